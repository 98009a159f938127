// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mpnerf {

std::vector<AblationRow> ablate_references(const SceneViews& train_views,
                                           const std::vector<EvalView>& test_views,
                                           const std::vector<int>& counts,
                                           const std::vector<int>& resolutions,
                                           const TrainConfig& base_config, ThreadPool& pool) {
  if (counts.empty() || resolutions.empty()) {
    throw ValidationError("ablate: need at least one count and one resolution");
  }
  if (test_views.empty()) throw ValidationError("ablate: no test views");
  const int native = train_views.images.empty() ? 0 : train_views.images[0].width;

  std::vector<AblationRow> rows;
  for (int count : counts) {
    for (int resolution : resolutions) {
      if (resolution < 1 || native % resolution != 0) {
        throw ValidationError("ablate: resolution must divide the native view size");
      }
      const int factor = native / resolution;

      TrainConfig config = base_config;
      config.n_refs = count;
      config.validate();

      const ViewSplit split = split_views(train_views.cameras, count, config.split);
      TrainData data;
      ReferenceSet refs;
      for (int idx : split.ref_indices) {
        const ImageF rgb =
            composite_alpha(train_views.images[idx], config.background);
        refs.images.push_back(ReferenceImage{downsample_box(rgb, factor),
                                             downsample_camera(train_views.cameras[idx], factor)});
      }
      refs.validate();
      data.refs.push_back(std::move(refs));
      for (int idx : split.train_indices) {
        data.views.push_back(TrainView{train_views.cameras[idx],
                                       composite_alpha(train_views.images[idx], config.background),
                                       0});
      }

      const DataTrainResult trained = train_with_data(data, config, pool);

      RenderConfig render_config;
      render_config.n_samples = config.samples_per_ray;
      render_config.t_near = config.t_near;
      render_config.t_far = config.t_far;
      render_config.background = config.background;
      render_config.mode = config.mode;
      render_config.seed = config.seed;
      render_config.chunk_rays = config.chunk_rays;
      const MetricReport report =
          eval_scene(trained.params, data.refs[0], test_views, render_config, pool);

      rows.push_back(AblationRow{count, resolution, report.mean_psnr});
    }
  }
  return rows;
}

void write_ablation_csv(const std::string& path, const std::vector<AblationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("ablate: cannot write " + path);
  out << "n_refs,resolution,mean_psnr\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f\n", row.n_refs, row.resolution, row.mean_psnr);
    out << buf;
  }
}

MetricReport eval_cross_class(const Params<float>& params, const MultiObjectDataset& objects,
                              const TrainConfig& protocol, const RenderConfig& render_config,
                              int eval_views_per_object, ThreadPool& pool) {
  if (objects.objects.empty()) throw ValidationError("cross-class eval: no objects");
  MetricReport total;
  int next_id = 0;
  for (const ObjectViews& object : objects.objects) {
    const ViewSplit split =
        split_views(object.views.cameras, protocol.n_refs, protocol.split);
    const ReferenceSet refs =
        make_reference_set(object.views, split.ref_indices, protocol.background);

    std::vector<EvalView> views;
    const int cap = eval_views_per_object > 0
                        ? std::min<int>(eval_views_per_object,
                                        static_cast<int>(split.train_indices.size()))
                        : static_cast<int>(split.train_indices.size());
    for (int i = 0; i < cap; ++i) {
      const int idx = split.train_indices[i];
      views.push_back(EvalView{object.views.cameras[idx],
                               composite_alpha(object.views.images[idx], protocol.background)});
    }
    const MetricReport report = eval_scene(params, refs, views, render_config, pool);
    for (size_t i = 0; i < report.view_ids.size(); ++i) {
      total.view_ids.push_back(next_id++);
      total.psnr_db.push_back(report.psnr_db[i]);
      total.ssim_val.push_back(report.ssim_val[i]);
    }
  }
  total.finalize();
  return total;
}

void write_cross_class_csv(const std::string& path, const std::vector<std::string>& classes,
                           const std::vector<CrossClassCell>& cells) {
  std::ofstream out(path);
  if (!out) throw DataError("cross-class eval: cannot write " + path);
  out << "trained_on";
  for (const auto& c : classes) out << ',' << c;
  out << '\n';
  char buf[64];
  for (const auto& trained : classes) {
    out << trained;
    for (const auto& rendered : classes) {
      double value = std::nan("");
      for (const auto& cell : cells) {
        if (cell.trained_on == trained && cell.rendered_on == rendered) value = cell.mean_psnr;
      }
      std::snprintf(buf, sizeof(buf), ",%.6f", value);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace mpnerf
