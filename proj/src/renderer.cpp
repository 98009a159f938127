// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/renderer.hpp"

#include <algorithm>
#include <cmath>

namespace mpnerf {

template <typename T>
std::vector<T> stratified_sample(const Ray& ray, int n, SamplingMode mode, Pcg32& rng) {
  if (n < 1) throw ValidationError("stratified_sample: need at least one sample");
  std::vector<T> t(n);
  const double bin = (ray.t_far - ray.t_near) / n;
  for (int i = 0; i < n; ++i) {
    const double u = mode == SamplingMode::Midpoint ? 0.5 : rng.next_double();
    t[i] = static_cast<T>(ray.t_near + (i + u) * bin);
  }
  return t;
}

template std::vector<float> stratified_sample<float>(const Ray&, int, SamplingMode, Pcg32&);
template std::vector<double> stratified_sample<double>(const Ray&, int, SamplingMode, Pcg32&);

template <typename T>
std::vector<T> deltas_from_t(const std::vector<T>& t_values) {
  std::vector<T> d(t_values.size());
  for (size_t i = 0; i + 1 < t_values.size(); ++i) d[i] = t_values[i + 1] - t_values[i];
  if (!t_values.empty()) d.back() = static_cast<T>(kLastDelta);
  return d;
}

template std::vector<float> deltas_from_t<float>(const std::vector<float>&);
template std::vector<double> deltas_from_t<double>(const std::vector<double>&);

namespace detail {

// rgb: n x 3 rows. Fills weights (n), color (3) and alpha.
template <typename T>
void composite_span(const T* t, const T* delta, const T* rgb, const T* sigma, int n,
                    const T* background, T* weights, T* color, T* alpha) {
  for (int i = 0; i < n; ++i) {
    if (!(sigma[i] >= T(0))) throw ValidationError("composite: negative sigma");
    if (i + 1 < n && !(t[i] < t[i + 1])) {
      throw ValidationError("composite: t values must be strictly ascending");
    }
    if (!(delta[i] > T(0))) throw ValidationError("composite: deltas must be positive");
  }
  T transmittance = T(1);
  T acc = T(0);
  color[0] = color[1] = color[2] = T(0);
  for (int i = 0; i < n; ++i) {
    const T e = std::exp(-sigma[i] * delta[i]);
    const T w = transmittance * (T(1) - e);
    weights[i] = w;
    color[0] += w * rgb[static_cast<size_t>(i) * 3 + 0];
    color[1] += w * rgb[static_cast<size_t>(i) * 3 + 1];
    color[2] += w * rgb[static_cast<size_t>(i) * 3 + 2];
    acc += w;
    transmittance *= e;
  }
  const T rest = T(1) - acc;
  color[0] += rest * background[0];
  color[1] += rest * background[1];
  color[2] += rest * background[2];
  *alpha = acc;
}

// Reverse of composite_span for one ray. upstream rows: [dr, dg, db, dsigma].
// d color / d sigma_i = delta_i * (T_{i+1} (c_i - B) - sum_{j>i} w_j (c_j - B)).
template <typename T>
void composite_backward_span(const T* delta, const T* rgb, const T* sigma, const T* weights,
                             int n, const T* d_color, const T* background, T* upstream) {
  std::vector<T> t_post(n);
  T transmittance = T(1);
  for (int i = 0; i < n; ++i) {
    transmittance *= std::exp(-sigma[i] * delta[i]);
    t_post[i] = transmittance;
  }
  T suffix[3] = {T(0), T(0), T(0)};
  for (int i = n - 1; i >= 0; --i) {
    T* up = upstream + static_cast<size_t>(i) * 4;
    const T* c = rgb + static_cast<size_t>(i) * 3;
    up[0] = weights[i] * d_color[0];
    up[1] = weights[i] * d_color[1];
    up[2] = weights[i] * d_color[2];
    T ds = T(0);
    for (int ch = 0; ch < 3; ++ch) {
      const T diff = c[ch] - background[ch];
      ds += d_color[ch] * (t_post[i] * diff - suffix[ch]);
    }
    up[3] = delta[i] * ds;
    for (int ch = 0; ch < 3; ++ch) suffix[ch] += weights[i] * (c[ch] - background[ch]);
  }
}

template void composite_span<float>(const float*, const float*, const float*, const float*, int,
                                    const float*, float*, float*, float*);
template void composite_span<double>(const double*, const double*, const double*, const double*,
                                     int, const double*, double*, double*, double*);
template void composite_backward_span<float>(const float*, const float*, const float*,
                                             const float*, int, const float*, const float*,
                                             float*);
template void composite_backward_span<double>(const double*, const double*, const double*,
                                              const double*, int, const double*, const double*,
                                              double*);

}  // namespace detail

template <typename T>
RenderedPixel<T> composite(RaySampleBatch<T>& batch, const std::array<T, 3>& background) {
  const int n = static_cast<int>(batch.t_values.size());
  if (static_cast<int>(batch.deltas.size()) != n ||
      static_cast<int>(batch.samples.size()) != n) {
    throw ValidationError("composite: inconsistent batch sizes");
  }
  std::vector<T> rgb(static_cast<size_t>(n) * 3);
  std::vector<T> sigma(n);
  for (int i = 0; i < n; ++i) {
    rgb[static_cast<size_t>(i) * 3 + 0] = batch.samples[i].color[0];
    rgb[static_cast<size_t>(i) * 3 + 1] = batch.samples[i].color[1];
    rgb[static_cast<size_t>(i) * 3 + 2] = batch.samples[i].color[2];
    sigma[i] = batch.samples[i].sigma;
  }
  batch.weights.resize(n);
  RenderedPixel<T> px;
  detail::composite_span(batch.t_values.data(), batch.deltas.data(), rgb.data(), sigma.data(), n,
                         background.data(), batch.weights.data(), px.color.data(),
                         &px.accumulated_alpha);
  return px;
}

template RenderedPixel<float> composite<float>(RaySampleBatch<float>&,
                                               const std::array<float, 3>&);
template RenderedPixel<double> composite<double>(RaySampleBatch<double>&,
                                                 const std::array<double, 3>&);

template <typename T>
void composite_backward(const RaySampleBatch<T>& batch, const std::array<T, 3>& d_color,
                        const std::array<T, 3>& background, T* upstream_out) {
  const int n = static_cast<int>(batch.t_values.size());
  if (static_cast<int>(batch.weights.size()) != n) {
    throw UsageError("composite_backward: weights missing; run composite first");
  }
  std::vector<T> rgb(static_cast<size_t>(n) * 3);
  std::vector<T> sigma(n);
  for (int i = 0; i < n; ++i) {
    rgb[static_cast<size_t>(i) * 3 + 0] = batch.samples[i].color[0];
    rgb[static_cast<size_t>(i) * 3 + 1] = batch.samples[i].color[1];
    rgb[static_cast<size_t>(i) * 3 + 2] = batch.samples[i].color[2];
    sigma[i] = batch.samples[i].sigma;
  }
  detail::composite_backward_span(batch.deltas.data(), rgb.data(), sigma.data(),
                                  batch.weights.data(), n, d_color.data(), background.data(),
                                  upstream_out);
}

template void composite_backward<float>(const RaySampleBatch<float>&, const std::array<float, 3>&,
                                        const std::array<float, 3>&, float*);
template void composite_backward<double>(const RaySampleBatch<double>&,
                                         const std::array<double, 3>&,
                                         const std::array<double, 3>&, double*);

template <typename T>
RenderedPixel<T> render_ray(const Params<T>& params, const ReferenceSet& refs, const Ray& ray,
                            const RenderConfig& config, Pcg32& rng) {
  RaySampleBatch<T> batch;
  batch.t_values = stratified_sample<T>(ray, config.n_samples, config.sampling, rng);
  batch.deltas = deltas_from_t(batch.t_values);

  const int n = config.n_samples;
  const int feat_dim = feature_length(refs.count(), config.mode);
  std::vector<T> features(static_cast<size_t>(n) * feat_dim);
  std::vector<T> dirs(static_cast<size_t>(n) * 3);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d x = ray.point_at(static_cast<double>(batch.t_values[i]));
    build_features_into<T>(x, refs, config.mode, features.data() + static_cast<size_t>(i) * feat_dim);
    dirs[static_cast<size_t>(i) * 3 + 0] = static_cast<T>(ray.direction.x());
    dirs[static_cast<size_t>(i) * 3 + 1] = static_cast<T>(ray.direction.y());
    dirs[static_cast<size_t>(i) * 3 + 2] = static_cast<T>(ray.direction.z());
  }
  DecoderWorkspace<T> ws;
  decoder_forward_batch(params, features.data(), dirs.data(), n, nullptr, ws);
  batch.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    batch.samples[i].color = {ws.rgb[static_cast<size_t>(i) * 3 + 0],
                              ws.rgb[static_cast<size_t>(i) * 3 + 1],
                              ws.rgb[static_cast<size_t>(i) * 3 + 2]};
    batch.samples[i].sigma = ws.sigma[i];
  }
  const std::array<T, 3> bg = {static_cast<T>(config.background[0]),
                               static_cast<T>(config.background[1]),
                               static_cast<T>(config.background[2])};
  return composite(batch, bg);
}

template RenderedPixel<float> render_ray<float>(const Params<float>&, const ReferenceSet&,
                                                const Ray&, const RenderConfig&, Pcg32&);
template RenderedPixel<double> render_ray<double>(const Params<double>&, const ReferenceSet&,
                                                  const Ray&, const RenderConfig&, Pcg32&);

ImageF render_image(const Params<float>& params, const ReferenceSet& refs, const Camera& camera,
                    const RenderConfig& config, ThreadPool& pool) {
  camera.validate();
  const int n_pixels = camera.width * camera.height;
  const int n = config.n_samples;
  const int feat_dim = feature_length(refs.count(), config.mode);
  ImageF out(camera.width, camera.height, 3);

  // Shard count is a function of the image only, never of the pool size.
  const int n_shards = std::max(1, std::min(64, n_pixels / 256));
  const std::array<float, 3> bg = config.background;

  pool.parallel_shards(n_shards, [&](int shard) {
    const int begin = static_cast<int>(static_cast<int64_t>(shard) * n_pixels / n_shards);
    const int end = static_cast<int>(static_cast<int64_t>(shard + 1) * n_pixels / n_shards);
    const int max_rays = std::max(1, config.chunk_rays);

    DecoderWorkspace<float> ws;
    std::vector<float> features;
    std::vector<float> dirs;
    std::vector<float> ts;
    std::vector<float> weights(n);
    std::vector<Ray> rays(max_rays);

    for (int chunk = begin; chunk < end; chunk += max_rays) {
      const int count = std::min(max_rays, end - chunk);
      const int rows = count * n;
      features.resize(static_cast<size_t>(rows) * feat_dim);
      dirs.resize(static_cast<size_t>(rows) * 3);
      ts.resize(static_cast<size_t>(count) * n);

      for (int r = 0; r < count; ++r) {
        const int pixel = chunk + r;
        const int py = pixel / camera.width;
        const int px = pixel % camera.width;
        Pcg32 rng(stream_key(config.seed, static_cast<uint64_t>(pixel)), 0x72617973ull);
        rays[r] = ray_for_pixel(camera, px + 0.5, py + 0.5, config.t_near, config.t_far);
        std::vector<float> t = stratified_sample<float>(rays[r], n, config.sampling, rng);
        std::copy(t.begin(), t.end(), ts.begin() + static_cast<size_t>(r) * n);
        for (int i = 0; i < n; ++i) {
          const size_t row = static_cast<size_t>(r) * n + i;
          const Eigen::Vector3d x = rays[r].point_at(t[i]);
          build_features_into<float>(x, refs, config.mode, features.data() + row * feat_dim);
          dirs[row * 3 + 0] = static_cast<float>(rays[r].direction.x());
          dirs[row * 3 + 1] = static_cast<float>(rays[r].direction.y());
          dirs[row * 3 + 2] = static_cast<float>(rays[r].direction.z());
        }
      }

      decoder_forward_batch(params, features.data(), dirs.data(), rows, nullptr, ws);

      for (int r = 0; r < count; ++r) {
        const int pixel = chunk + r;
        const float* t = ts.data() + static_cast<size_t>(r) * n;
        std::vector<float> delta(n);
        for (int i = 0; i + 1 < n; ++i) delta[i] = t[i + 1] - t[i];
        delta[n - 1] = static_cast<float>(kLastDelta);
        float color[3];
        float alpha = 0.0f;
        detail::composite_span(t, delta.data(), ws.rgb.data() + static_cast<size_t>(r) * n * 3,
                               ws.sigma.data() + static_cast<size_t>(r) * n, n, bg.data(),
                               weights.data(), color, &alpha);
        const int py = pixel / camera.width;
        const int px = pixel % camera.width;
        out.at(py, px, 0) = color[0];
        out.at(py, px, 1) = color[1];
        out.at(py, px, 2) = color[2];
      }
    }
  });

  return out;
}

}  // namespace mpnerf
