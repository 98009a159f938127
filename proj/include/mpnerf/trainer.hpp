// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Training: MSE loss over rendered rays, Adam with exponential lr decay,
// single- and multi-object loops. Gradient accumulation uses a fixed shard
// count with an ordered reduction, so a full run is a pure function of
// (data, config, seed) regardless of thread count.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpnerf/dataset.hpp"
#include "mpnerf/decoder.hpp"
#include "mpnerf/renderer.hpp"
#include "mpnerf/thread_pool.hpp"

namespace mpnerf {

// Rays in a batch are split across this many gradient accumulators; the
// reduction runs in shard order. Fixed so results never depend on threads.
inline constexpr int kGradShards = 8;

enum class SplitStrategy { FirstN, AzimuthStratified };

struct TrainConfig {
  double learning_rate = 5e-4;
  double lr_final = 5e-5;  // exponential decay target at the last step
  int batch_rays = 1024;
  int iterations = 20000;
  int samples_per_ray = 64;
  double sigma_noise_std = 0.0;
  uint64_t seed = 0;
  FeatureMode mode = FeatureMode::Standard;
  int n_refs = 12;
  SplitStrategy split = SplitStrategy::AzimuthStratified;

  double t_near = 2.0;
  double t_far = 6.0;
  std::array<float, 3> background = {1.0f, 1.0f, 1.0f};

  std::vector<int> hidden = {256, 256, 256, 256, 256, 256, 256, 256};
  int skip_layer = 4;
  int dir_freqs = 4;
  int uv_freqs = 0;
  int chunk_rays = 128;
  int log_every = 100;

  void validate() const;
  Architecture architecture() const;
  double lr_at(int step) const;  // step is 1-based
};

template <typename T>
struct AdamState {
  Gradients<T> m;
  Gradients<T> v;
  int64_t step = 0;
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T epsilon = T(1e-8);

  AdamState() = default;
  explicit AdamState(const Params<T>& params) : m(zero_gradients(params)), v(zero_gradients(params)) {}
};

// Mean over rays of the squared color error (channels summed per ray).
template <typename T>
T mse_loss(const std::vector<std::array<T, 3>>& pred, const std::vector<std::array<T, 3>>& truth);

template <typename T>
void adam_step(Params<T>& params, const Gradients<T>& grads, AdamState<T>& state, T lr);

struct ViewSplit {
  std::vector<int> ref_indices;
  std::vector<int> train_indices;
};

// Deterministic reference/train split; the two index sets are disjoint.
ViewSplit split_views(const std::vector<Camera>& cameras, int n_refs, SplitStrategy strategy);

// Alpha-composites the selected views over `background` into a ReferenceSet.
ReferenceSet make_reference_set(const SceneViews& views, const std::vector<int>& indices,
                                const std::array<float, 3>& background);

struct MetricsRow {
  int step = 0;
  double loss = 0.0;
  double lr = 0.0;
  double wall_s = 0.0;
};

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

// One training view with its object index (0 for single-object runs).
struct TrainView {
  Camera camera;
  ImageF rgb;  // ground truth, composited over the training background
  int object = 0;
};

// Prepared training inputs: per-object reference sets plus ground truth.
struct TrainData {
  std::vector<ReferenceSet> refs;  // one per object
  std::vector<TrainView> views;

  int object_count() const { return static_cast<int>(refs.size()); }
};

// One (view, pixel) target drawn for a batch slot.
struct RayDraw {
  int view = 0;
  int pixel = 0;
};

// The deterministic per-step pixel sampler. With more than one object, every
// batch is guaranteed to touch at least two distinct objects.
std::vector<RayDraw> sample_training_rays(const TrainData& data, const TrainConfig& config,
                                          int step);

// One optimizer iteration (1-based step index): sample batch_rays pixels,
// render, backpropagate, apply Adam. Returns the batch loss.
float train_step(Params<float>& params, AdamState<float>& state, const TrainData& data,
                 const TrainConfig& config, int step, ThreadPool& pool);

using CheckpointFn = std::function<void(int step, const Params<float>& params)>;

struct TrainResult {
  Params<float> params;
  std::vector<MetricsRow> log;
  ReferenceSet refs;
  std::vector<int> ref_indices;
};

// Splits the given views into references and training targets, then runs the
// full loop. checkpoint_every = 0 disables periodic checkpoints.
TrainResult train_single_object(const SceneViews& views, const TrainConfig& config,
                                ThreadPool& pool, int checkpoint_every = 0,
                                const CheckpointFn& on_checkpoint = {});

struct MultiTrainResult {
  Params<float> params;
  std::vector<MetricsRow> log;
  std::vector<ReferenceSet> refs;                // per object
  std::vector<std::vector<int>> ref_indices;     // per object
};

// Generalization-mode training across >= 2 objects; every batch draws rays
// from at least two distinct objects.
MultiTrainResult train_multi_object(const std::vector<SceneViews>& objects,
                                    const TrainConfig& config, ThreadPool& pool,
                                    int checkpoint_every = 0,
                                    const CheckpointFn& on_checkpoint = {});

}  // namespace mpnerf
