// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Ray sampling and volumetric compositing. Rays are independent; per-ray RNG
// streams are keyed by (seed, ray id) so renders do not depend on thread
// count or chunk size.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/decoder.hpp"
#include "mpnerf/geometry.hpp"
#include "mpnerf/multiplane.hpp"
#include "mpnerf/rng.hpp"
#include "mpnerf/thread_pool.hpp"

namespace mpnerf {

// Distance past the last sample; the standard opaque-beyond convention.
inline constexpr double kLastDelta = 1e10;

enum class SamplingMode { Stratified, Midpoint };

struct RenderConfig {
  int n_samples = 64;
  double t_near = 2.0;
  double t_far = 6.0;
  std::array<float, 3> background = {1.0f, 1.0f, 1.0f};
  SamplingMode sampling = SamplingMode::Stratified;
  uint64_t seed = 0;
  FeatureMode mode = FeatureMode::Standard;
  int chunk_rays = 128;  // rays per decoder batch; does not affect results
};

template <typename T>
struct RaySampleBatch {
  std::vector<T> t_values;  // ascending, in [t_near, t_far]
  std::vector<T> deltas;    // t[i+1]-t[i], last = kLastDelta
  std::vector<RadianceOutput<T>> samples;
  std::vector<T> weights;   // filled by composite()
};

template <typename T>
struct RenderedPixel {
  std::array<T, 3> color{};
  T accumulated_alpha = T(0);
};

// One t per equal bin of [t_near, t_far]; uniform jitter per bin
// (Stratified) or the bin center (Midpoint). n must be >= 1.
template <typename T>
std::vector<T> stratified_sample(const Ray& ray, int n, SamplingMode mode, Pcg32& rng);

template <typename T>
std::vector<T> deltas_from_t(const std::vector<T>& t_values);

namespace detail {

// Row-level compositing shared by the renderer and the trainer; rgb holds
// n x 3 rows. Fills weights (n), color (3) and alpha.
template <typename T>
void composite_span(const T* t, const T* delta, const T* rgb, const T* sigma, int n,
                    const T* background, T* weights, T* color, T* alpha);

// Reverse pass for one ray; writes n rows [dr, dg, db, dsigma].
template <typename T>
void composite_backward_span(const T* delta, const T* rgb, const T* sigma, const T* weights,
                             int n, const T* d_color, const T* background, T* upstream);

}  // namespace detail

// Transmittance compositing over the batch; fills batch.weights. Throws
// ValidationError on negative sigma or non-ascending t.
template <typename T>
RenderedPixel<T> composite(RaySampleBatch<T>& batch, const std::array<T, 3>& background);

// d(loss)/d(color_i), d(loss)/d(sigma_i) given d(loss)/d(pixel color).
// Expects batch.weights from a prior composite() call. Writes per-sample
// rows [dr, dg, db, dsigma] into upstream_out.
template <typename T>
void composite_backward(const RaySampleBatch<T>& batch, const std::array<T, 3>& d_color,
                        const std::array<T, 3>& background, T* upstream_out);

// Full per-ray pipeline: sample -> features -> decoder -> composite.
template <typename T>
RenderedPixel<T> render_ray(const Params<T>& params, const ReferenceSet& refs, const Ray& ray,
                            const RenderConfig& config, Pcg32& rng);

// Per-pixel rays through pixel centers; per-pixel streams keyed by
// (config.seed, pixel index). Chunked internally; results are identical for
// any chunk size or pool size.
ImageF render_image(const Params<float>& params, const ReferenceSet& refs, const Camera& camera,
                    const RenderConfig& config, ThreadPool& pool);

}  // namespace mpnerf
