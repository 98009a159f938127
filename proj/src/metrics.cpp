// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace mpnerf {

template <typename T>
double psnr(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b)) throw ValidationError("psnr: image shapes differ");
  if (a.data.empty()) throw ValidationError("psnr: empty images");
  double sum = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

template double psnr<float>(const ImageF&, const ImageF&);
template double psnr<double>(const ImageD&, const ImageD&);

namespace {
constexpr int kSsimWindow = 7;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;
}  // namespace

// Summed-area tables per channel give O(1) window sums; the test suite
// checks this against a direct per-window evaluation.
template <typename T>
double ssim(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b)) throw ValidationError("ssim: image shapes differ");
  const int w = a.width;
  const int h = a.height;
  if (w < kSsimWindow || h < kSsimWindow) {
    throw ValidationError("ssim: image smaller than the 7x7 window");
  }

  const int sw = w + 1;
  const int sh = h + 1;
  std::vector<double> sx(static_cast<size_t>(sw) * sh), sy(sx.size()), sxx(sx.size()),
      syy(sx.size()), sxy(sx.size());
  auto at = [sw](std::vector<double>& t, int y, int x) -> double& {
    return t[static_cast<size_t>(y) * sw + x];
  };

  const double n_win = static_cast<double>(kSsimWindow) * kSsimWindow;
  double total = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double va = a.at(y, x, c);
        const double vb = b.at(y, x, c);
        at(sx, y + 1, x + 1) = va + at(sx, y, x + 1) + at(sx, y + 1, x) - at(sx, y, x);
        at(sy, y + 1, x + 1) = vb + at(sy, y, x + 1) + at(sy, y + 1, x) - at(sy, y, x);
        at(sxx, y + 1, x + 1) = va * va + at(sxx, y, x + 1) + at(sxx, y + 1, x) - at(sxx, y, x);
        at(syy, y + 1, x + 1) = vb * vb + at(syy, y, x + 1) + at(syy, y + 1, x) - at(syy, y, x);
        at(sxy, y + 1, x + 1) = va * vb + at(sxy, y, x + 1) + at(sxy, y + 1, x) - at(sxy, y, x);
      }
    }
    auto window = [&](std::vector<double>& t, int y, int x) {
      return at(t, y + kSsimWindow, x + kSsimWindow) - at(t, y, x + kSsimWindow) -
             at(t, y + kSsimWindow, x) + at(t, y, x);
    };
    double channel_sum = 0.0;
    for (int y = 0; y + kSsimWindow <= h; ++y) {
      for (int x = 0; x + kSsimWindow <= w; ++x) {
        const double mx = window(sx, y, x) / n_win;
        const double my = window(sy, y, x) / n_win;
        const double vx = window(sxx, y, x) / n_win - mx * mx;
        const double vy = window(syy, y, x) / n_win - my * my;
        const double cov = window(sxy, y, x) / n_win - mx * my;
        const double num = (2.0 * mx * my + kSsimC1) * (2.0 * cov + kSsimC2);
        const double den = (mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2);
        channel_sum += num / den;
      }
    }
    const double positions =
        static_cast<double>(h - kSsimWindow + 1) * (w - kSsimWindow + 1);
    total += channel_sum / positions;
  }
  return total / a.channels;
}

template double ssim<float>(const ImageF&, const ImageF&);
template double ssim<double>(const ImageD&, const ImageD&);

void MetricReport::finalize() {
  mean_psnr = 0.0;
  mean_ssim = 0.0;
  if (psnr_db.empty()) return;
  for (double v : psnr_db) mean_psnr += v;
  for (double v : ssim_val) mean_ssim += v;
  mean_psnr /= static_cast<double>(psnr_db.size());
  mean_ssim /= static_cast<double>(ssim_val.size());
}

namespace {

std::string format_metric(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void MetricReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("report: cannot write " + path);
  out << "view_id,psnr_db,ssim\n";
  for (size_t i = 0; i < view_ids.size(); ++i) {
    out << view_ids[i] << ',' << format_metric(psnr_db[i]) << ',' << format_metric(ssim_val[i])
        << '\n';
  }
  out << "mean_psnr," << format_metric(mean_psnr) << '\n';
  out << "mean_ssim," << format_metric(mean_ssim) << '\n';
}

MetricReport eval_scene(const Params<float>& params, const ReferenceSet& refs,
                        const std::vector<EvalView>& views, const RenderConfig& config,
                        ThreadPool& pool) {
  if (views.empty()) throw ValidationError("eval: no test views");
  MetricReport report;
  for (size_t i = 0; i < views.size(); ++i) {
    const ImageF render = render_image(params, refs, views[i].camera, config, pool);
    report.view_ids.push_back(static_cast<int>(i));
    report.psnr_db.push_back(psnr(render, views[i].ground_truth));
    report.ssim_val.push_back(ssim(render, views[i].ground_truth));
  }
  report.finalize();
  return report;
}

}  // namespace mpnerf
