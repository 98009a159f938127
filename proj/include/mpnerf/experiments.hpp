// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment protocols on top of the trainer and metrics: reference-count /
// reference-resolution ablations and cross-class generalization evaluation.

#pragma once

#include <string>
#include <vector>

#include "mpnerf/dataset.hpp"
#include "mpnerf/metrics.hpp"
#include "mpnerf/trainer.hpp"

namespace mpnerf {

// Training on explicitly prepared data (used by the ablation driver; the
// regular entry points build TrainData themselves).
struct DataTrainResult {
  Params<float> params;
  std::vector<MetricsRow> log;
};
DataTrainResult train_with_data(const TrainData& data, const TrainConfig& config,
                                ThreadPool& pool);

struct AblationRow {
  int n_refs = 0;
  int resolution = 0;
  double mean_psnr = 0.0;
};

// One training run per (count, resolution) with a shared seed; reference
// images are box-downsampled to `resolution`, training/test views keep the
// native resolution. Rows come back in sweep order.
std::vector<AblationRow> ablate_references(const SceneViews& train_views,
                                           const std::vector<EvalView>& test_views,
                                           const std::vector<int>& counts,
                                           const std::vector<int>& resolutions,
                                           const TrainConfig& base_config, ThreadPool& pool);

void write_ablation_csv(const std::string& path, const std::vector<AblationRow>& rows);

// Held-out evaluation of generalization-mode parameters on foreign objects:
// every object contributes its own reference set (deterministic split of its
// views); no parameter is ever updated. eval_views_per_object caps the number
// of scored views per object (0 = all non-reference views).
MetricReport eval_cross_class(const Params<float>& params, const MultiObjectDataset& objects,
                              const TrainConfig& protocol, const RenderConfig& render_config,
                              int eval_views_per_object, ThreadPool& pool);

struct CrossClassCell {
  std::string trained_on;
  std::string rendered_on;
  double mean_psnr = 0.0;
};

void write_cross_class_csv(const std::string& path, const std::vector<std::string>& classes,
                           const std::vector<CrossClassCell>& cells);

}  // namespace mpnerf
