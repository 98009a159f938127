// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "mpnerf/experiments.hpp"
#include "mpnerf/kernels.hpp"
#include "mpnerf/rng.hpp"

namespace mpnerf {

namespace {
constexpr uint64_t kTagBatch = 0x62617463ull;
constexpr uint64_t kTagRay = 0x72617973ull;
}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0.0 || lr_final <= 0.0) throw ValidationError("train: lr must be positive");
  if (batch_rays < 1) throw ValidationError("train: batch_rays must be positive");
  if (iterations < 1) throw ValidationError("train: iterations must be positive");
  if (samples_per_ray < 1) throw ValidationError("train: samples_per_ray must be positive");
  if (sigma_noise_std < 0.0) throw ValidationError("train: sigma noise must be >= 0");
  if (n_refs < 1) throw ValidationError("train: n_refs must be positive");
  if (!(t_near >= 0.0 && t_far > t_near)) throw ValidationError("train: bad t range");
  if (chunk_rays < 1) throw ValidationError("train: chunk_rays must be positive");
}

Architecture TrainConfig::architecture() const {
  Architecture arch;
  arch.n_refs = n_refs;
  arch.block_size = feature_block_size(mode);
  arch.uv_freqs = uv_freqs;
  arch.hidden = hidden;
  arch.skip_layer = skip_layer;
  arch.dir_freqs = dir_freqs;
  arch.validate();
  return arch;
}

double TrainConfig::lr_at(int step) const {
  if (iterations <= 1) return learning_rate;
  const double t = static_cast<double>(step - 1) / static_cast<double>(iterations - 1);
  return learning_rate * std::pow(lr_final / learning_rate, t);
}

template <typename T>
T mse_loss(const std::vector<std::array<T, 3>>& pred, const std::vector<std::array<T, 3>>& truth) {
  if (pred.size() != truth.size()) throw ValidationError("mse_loss: batch sizes differ");
  if (pred.empty()) throw ValidationError("mse_loss: empty batch");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(pred[i][c]) - static_cast<double>(truth[i][c]);
      sum += d * d;
    }
  }
  return static_cast<T>(sum / static_cast<double>(pred.size()));
}

template float mse_loss<float>(const std::vector<std::array<float, 3>>&,
                               const std::vector<std::array<float, 3>>&);
template double mse_loss<double>(const std::vector<std::array<double, 3>>&,
                                 const std::vector<std::array<double, 3>>&);

template <typename T>
void adam_step(Params<T>& params, const Gradients<T>& grads, AdamState<T>& state, T lr) {
  if (grads.layers.size() != params.layers.size() ||
      state.m.layers.size() != params.layers.size()) {
    throw ValidationError("adam: shape mismatch");
  }
  state.step += 1;
  const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(state.beta1), state.step));
  const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(state.beta2), state.step));
  for (size_t l = 0; l < params.layers.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grads.layers[l];
    auto& m = state.m.layers[l];
    auto& v = state.v.layers[l];
    if (g.w.size() != p.w.size() || g.b.size() != p.b.size()) {
      throw ValidationError("adam: layer shape mismatch");
    }
    auto update = [&](std::vector<T>& pv, const std::vector<T>& gv, std::vector<T>& mv,
                      std::vector<T>& vv) {
      for (size_t i = 0; i < pv.size(); ++i) {
        mv[i] = state.beta1 * mv[i] + (T(1) - state.beta1) * gv[i];
        vv[i] = state.beta2 * vv[i] + (T(1) - state.beta2) * gv[i] * gv[i];
        const T mhat = mv[i] / c1;
        const T vhat = vv[i] / c2;
        pv[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
      }
    };
    update(p.w, g.w, m.w, v.w);
    update(p.b, g.b, m.b, v.b);
  }
}

template void adam_step<float>(Params<float>&, const Gradients<float>&, AdamState<float>&, float);
template void adam_step<double>(Params<double>&, const Gradients<double>&, AdamState<double>&,
                                double);

ViewSplit split_views(const std::vector<Camera>& cameras, int n_refs, SplitStrategy strategy) {
  const int n_views = static_cast<int>(cameras.size());
  if (n_refs < 1 || n_refs >= n_views) {
    throw ValidationError("split_views: need 1 <= n_refs < view count");
  }
  ViewSplit split;
  std::vector<bool> is_ref(n_views, false);
  if (strategy == SplitStrategy::FirstN) {
    for (int i = 0; i < n_refs; ++i) {
      split.ref_indices.push_back(i);
      is_ref[i] = true;
    }
  } else {
    std::vector<int> order(n_views);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> azimuth(n_views);
    for (int i = 0; i < n_views; ++i) {
      const Eigen::Vector3d p = cameras[i].position();
      azimuth[i] = std::atan2(p.y(), p.x());
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return azimuth[a] != azimuth[b] ? azimuth[a] < azimuth[b] : a < b;
    });
    for (int j = 0; j < n_refs; ++j) {
      const int pick = order[static_cast<int>(static_cast<int64_t>(j) * n_views / n_refs)];
      split.ref_indices.push_back(pick);
      is_ref[pick] = true;
    }
  }
  for (int i = 0; i < n_views; ++i) {
    if (!is_ref[i]) split.train_indices.push_back(i);
  }
  return split;
}

ReferenceSet make_reference_set(const SceneViews& views, const std::vector<int>& indices,
                                const std::array<float, 3>& background) {
  ReferenceSet refs;
  for (int idx : indices) {
    if (idx < 0 || idx >= views.count()) throw ValidationError("make_reference_set: bad index");
    refs.images.push_back(
        ReferenceImage{composite_alpha(views.images[idx], background), views.cameras[idx]});
  }
  refs.validate();
  return refs;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("metrics: cannot write " + path);
  out << "step,loss,lr,wall_clock_s\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.8g,%.8g,%.3f\n", row.step, row.loss, row.lr, row.wall_s);
    out << buf;
  }
}

std::vector<RayDraw> sample_training_rays(const TrainData& data, const TrainConfig& config,
                                          int step) {
  const int n_objects = data.object_count();
  std::vector<std::vector<int>> views_of(n_objects);
  for (int i = 0; i < static_cast<int>(data.views.size()); ++i) {
    views_of[data.views[i].object].push_back(i);
  }
  for (const auto& v : views_of) {
    if (v.empty()) throw ValidationError("train: an object has no training views");
  }

  Pcg32 rng(stream_key(config.seed, kTagBatch, static_cast<uint64_t>(step)), kTagBatch);
  std::vector<RayDraw> draws(config.batch_rays);
  for (;;) {
    std::set<int> touched;
    for (auto& draw : draws) {
      int view_idx;
      if (n_objects > 1) {
        const int object = static_cast<int>(rng.next_below(n_objects));
        touched.insert(object);
        const auto& pool_v = views_of[object];
        view_idx = pool_v[rng.next_below(static_cast<uint32_t>(pool_v.size()))];
      } else {
        view_idx = static_cast<int>(rng.next_below(static_cast<uint32_t>(data.views.size())));
      }
      const ImageF& img = data.views[view_idx].rgb;
      draw.view = view_idx;
      draw.pixel = static_cast<int>(rng.next_below(static_cast<uint32_t>(img.pixel_count())));
    }
    // Multi-object batches must mix objects (redraw is deterministic).
    if (n_objects <= 1 || touched.size() >= 2) break;
  }
  return draws;
}

namespace {

double shard_pass(const TrainData& data, const TrainConfig& config,
                  const Params<float>& params, const std::vector<RayDraw>& draws, int step,
                  int begin, int end, Gradients<float>& grads, DecoderWorkspace<float>& ws) {
  const int n = config.samples_per_ray;
  const int feat_dim = feature_length(config.n_refs, config.mode);
  const float inv_batch = 1.0f / static_cast<float>(config.batch_rays);
  const std::array<float, 3> bg = config.background;

  std::vector<float> features;
  std::vector<float> dirs;
  std::vector<float> ts;
  std::vector<float> noise;
  std::vector<float> upstream;
  std::vector<float> weights(n);
  std::vector<float> deltas(n);

  double loss_sum = 0.0;
  for (int chunk = begin; chunk < end; chunk += config.chunk_rays) {
    const int count = std::min(config.chunk_rays, end - chunk);
    const int rows = count * n;
    features.resize(static_cast<size_t>(rows) * feat_dim);
    dirs.resize(static_cast<size_t>(rows) * 3);
    ts.resize(static_cast<size_t>(rows));
    upstream.resize(static_cast<size_t>(rows) * 4);
    const bool use_noise = config.sigma_noise_std > 0.0;
    if (use_noise) noise.resize(rows);

    std::vector<Ray> rays(count);
    for (int r = 0; r < count; ++r) {
      const int slot = chunk + r;
      const RayDraw& draw = draws[slot];
      const TrainView& view = data.views[draw.view];
      const int px = draw.pixel % view.rgb.width;
      const int py = draw.pixel / view.rgb.width;
      rays[r] = ray_for_pixel(view.camera, px + 0.5, py + 0.5, config.t_near, config.t_far);

      Pcg32 rng(stream_key(config.seed, kTagRay, static_cast<uint64_t>(step),
                           static_cast<uint64_t>(slot)),
                kTagRay);
      const std::vector<float> t = stratified_sample<float>(rays[r], n, SamplingMode::Stratified,
                                                            rng);
      std::copy(t.begin(), t.end(), ts.begin() + static_cast<size_t>(r) * n);
      if (use_noise) {
        for (int i = 0; i < n; ++i) {
          noise[static_cast<size_t>(r) * n + i] =
              static_cast<float>(config.sigma_noise_std * rng.next_gaussian());
        }
      }
      const ReferenceSet& refs = data.refs[view.object];
      for (int i = 0; i < n; ++i) {
        const size_t row = static_cast<size_t>(r) * n + i;
        build_features_into<float>(rays[r].point_at(t[i]), refs, config.mode,
                                   features.data() + row * feat_dim);
        dirs[row * 3 + 0] = static_cast<float>(rays[r].direction.x());
        dirs[row * 3 + 1] = static_cast<float>(rays[r].direction.y());
        dirs[row * 3 + 2] = static_cast<float>(rays[r].direction.z());
      }
    }

    decoder_forward_batch(params, features.data(), dirs.data(), rows,
                          use_noise ? noise.data() : nullptr, ws);

    for (int r = 0; r < count; ++r) {
      const int slot = chunk + r;
      const TrainView& view = data.views[draws[slot].view];
      const int px = draws[slot].pixel % view.rgb.width;
      const int py = draws[slot].pixel / view.rgb.width;
      const float* t = ts.data() + static_cast<size_t>(r) * n;
      for (int i = 0; i + 1 < n; ++i) deltas[i] = t[i + 1] - t[i];
      deltas[n - 1] = static_cast<float>(kLastDelta);

      const float* rgb_rows = ws.rgb.data() + static_cast<size_t>(r) * n * 3;
      const float* sigma_rows = ws.sigma.data() + static_cast<size_t>(r) * n;
      float color[3];
      float alpha = 0.0f;
      detail::composite_span(t, deltas.data(), rgb_rows, sigma_rows, n, bg.data(),
                             weights.data(), color, &alpha);

      float d_color[3];
      for (int c = 0; c < 3; ++c) {
        const float diff = color[c] - view.rgb.at(py, px, c);
        loss_sum += static_cast<double>(diff) * diff;
        d_color[c] = 2.0f * diff * inv_batch;
      }
      detail::composite_backward_span(deltas.data(), rgb_rows, sigma_rows, weights.data(), n,
                                      d_color, bg.data(),
                                      upstream.data() + static_cast<size_t>(r) * n * 4);
    }

    decoder_backward_batch(params, upstream.data(), ws, grads);
  }
  return loss_sum;
}

struct ShardBuffers {
  std::vector<Gradients<float>> grads;
  std::vector<DecoderWorkspace<float>> ws;
  std::vector<double> loss;

  void init(const Params<float>& params) {
    grads.assign(kGradShards, zero_gradients(params));
    ws.resize(kGradShards);
    loss.assign(kGradShards, 0.0);
  }
  void zero() {
    for (auto& g : grads) {
      for (auto& layer : g.layers) {
        std::fill(layer.w.begin(), layer.w.end(), 0.0f);
        std::fill(layer.b.begin(), layer.b.end(), 0.0f);
      }
    }
    std::fill(loss.begin(), loss.end(), 0.0);
  }
};

float train_step_impl(Params<float>& params, AdamState<float>& state, const TrainData& data,
                      const TrainConfig& config, int step, ThreadPool& pool,
                      ShardBuffers& buffers) {
  const std::vector<RayDraw> draws = sample_training_rays(data, config, step);
  buffers.zero();

  const int batch = config.batch_rays;
  pool.parallel_shards(kGradShards, [&](int shard) {
    const int begin = static_cast<int>(static_cast<int64_t>(shard) * batch / kGradShards);
    const int end = static_cast<int>(static_cast<int64_t>(shard + 1) * batch / kGradShards);
    if (begin >= end) return;
    buffers.loss[shard] = shard_pass(data, config, params, draws, step, begin, end,
                                     buffers.grads[shard], buffers.ws[shard]);
  });

  double loss_sum = 0.0;
  for (int s = 0; s < kGradShards; ++s) loss_sum += buffers.loss[s];
  for (int s = 1; s < kGradShards; ++s) add_gradients(buffers.grads[0], buffers.grads[s]);

  const float loss = static_cast<float>(loss_sum / batch);
  if (!std::isfinite(loss)) throw NumericError("train: non-finite loss at step " +
                                               std::to_string(step));
  adam_step(params, buffers.grads[0], state, static_cast<float>(config.lr_at(step)));
  return loss;
}

std::vector<MetricsRow> run_loop(Params<float>& params, AdamState<float>& state,
                                 const TrainData& data, const TrainConfig& config,
                                 ThreadPool& pool, int checkpoint_every,
                                 const CheckpointFn& on_checkpoint) {
  ShardBuffers buffers;
  buffers.init(params);
  std::vector<MetricsRow> log;
  const auto start = std::chrono::steady_clock::now();
  for (int step = 1; step <= config.iterations; ++step) {
    const float loss = train_step_impl(params, state, data, config, step, pool, buffers);
    if (step % config.log_every == 0 || step == 1 || step == config.iterations) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log.push_back(MetricsRow{step, static_cast<double>(loss), config.lr_at(step), wall});
    }
    if (on_checkpoint && checkpoint_every > 0 && step % checkpoint_every == 0 &&
        step != config.iterations) {
      on_checkpoint(step, params);
    }
  }
  if (on_checkpoint) on_checkpoint(config.iterations, params);
  return log;
}

}  // namespace

float train_step(Params<float>& params, AdamState<float>& state, const TrainData& data,
                 const TrainConfig& config, int step, ThreadPool& pool) {
  if (data.views.empty() || data.refs.empty()) {
    throw ValidationError("train_step: empty training data");
  }
  ShardBuffers buffers;
  buffers.init(params);
  return train_step_impl(params, state, data, config, step, pool, buffers);
}

DataTrainResult train_with_data(const TrainData& data, const TrainConfig& config,
                                ThreadPool& pool) {
  config.validate();
  if (data.views.empty() || data.refs.empty()) {
    throw ValidationError("train: empty training data");
  }
  DataTrainResult result;
  result.params = init_params<float>(config.architecture(), config.seed);
  AdamState<float> state(result.params);
  result.log = run_loop(result.params, state, data, config, pool, 0, {});
  return result;
}

TrainResult train_single_object(const SceneViews& views, const TrainConfig& config,
                                ThreadPool& pool, int checkpoint_every,
                                const CheckpointFn& on_checkpoint) {
  config.validate();
  const ViewSplit split = split_views(views.cameras, config.n_refs, config.split);

  TrainData data;
  data.refs.push_back(make_reference_set(views, split.ref_indices, config.background));
  for (int idx : split.train_indices) {
    data.views.push_back(
        TrainView{views.cameras[idx], composite_alpha(views.images[idx], config.background), 0});
  }

  TrainResult result;
  result.params = init_params<float>(config.architecture(), config.seed);
  result.refs = data.refs[0];
  result.ref_indices = split.ref_indices;
  AdamState<float> state(result.params);
  result.log = run_loop(result.params, state, data, config, pool, checkpoint_every, on_checkpoint);
  return result;
}

MultiTrainResult train_multi_object(const std::vector<SceneViews>& objects,
                                    const TrainConfig& config, ThreadPool& pool,
                                    int checkpoint_every, const CheckpointFn& on_checkpoint) {
  config.validate();
  if (config.mode != FeatureMode::Generalization) {
    throw ValidationError("train_multi_object: requires generalization mode");
  }
  if (objects.size() < 2) {
    throw ValidationError("train_multi_object: need at least two objects");
  }

  TrainData data;
  MultiTrainResult result;
  for (size_t o = 0; o < objects.size(); ++o) {
    const ViewSplit split = split_views(objects[o].cameras, config.n_refs, config.split);
    data.refs.push_back(make_reference_set(objects[o], split.ref_indices, config.background));
    result.ref_indices.push_back(split.ref_indices);
    for (int idx : split.train_indices) {
      data.views.push_back(TrainView{objects[o].cameras[idx],
                                     composite_alpha(objects[o].images[idx], config.background),
                                     static_cast<int>(o)});
    }
  }
  result.refs = data.refs;

  result.params = init_params<float>(config.architecture(), config.seed);
  AdamState<float> state(result.params);
  result.log = run_loop(result.params, state, data, config, pool, checkpoint_every, on_checkpoint);
  return result;
}

}  // namespace mpnerf
