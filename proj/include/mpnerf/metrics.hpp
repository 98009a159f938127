// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/decoder.hpp"
#include "mpnerf/renderer.hpp"
#include "mpnerf/thread_pool.hpp"

namespace mpnerf {

// -10 log10(MSE) over all pixels and channels; +inf for identical images.
// Accumulation is in double regardless of the image scalar type.
template <typename T>
double psnr(const Image<T>& a, const Image<T>& b);

// SSIM with a 7x7 uniform window, C1 = 0.01^2, C2 = 0.03^2, biased (1/N)
// moments, computed per channel over valid window positions and averaged.
template <typename T>
double ssim(const Image<T>& a, const Image<T>& b);

struct MetricReport {
  std::vector<int> view_ids;
  std::vector<double> psnr_db;
  std::vector<double> ssim_val;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;

  void finalize();  // fills the means
  // view_id,psnr_db,ssim rows plus mean_psnr / mean_ssim footer rows.
  void write_csv(const std::string& path) const;
};

struct EvalView {
  Camera camera;
  ImageF ground_truth;  // RGB
};

// Renders every view and scores it; parameters and references are const.
MetricReport eval_scene(const Params<float>& params, const ReferenceSet& refs,
                        const std::vector<EvalView>& views, const RenderConfig& config,
                        ThreadPool& pool);

}  // namespace mpnerf
