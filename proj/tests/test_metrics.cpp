// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/metrics.hpp"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "mpnerf/rng.hpp"
#include "mpnerf/runmeta.hpp"
#include "mpnerf/toy.hpp"

using namespace mpnerf;

namespace {

ImageD random_image(int w, int h, Pcg32& rng) {
  ImageD img(w, h, 3);
  for (auto& v : img.data) v = rng.next_double();
  return img;
}

// Direct per-window SSIM evaluation; no shared code with metrics.cpp.
double ssim_direct(const ImageD& a, const ImageD& b) {
  const int win = 7;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    double channel = 0.0;
    int count = 0;
    for (int y = 0; y + win <= a.height; ++y) {
      for (int x = 0; x + win <= a.width; ++x) {
        double mx = 0, my = 0;
        for (int dy = 0; dy < win; ++dy) {
          for (int dx = 0; dx < win; ++dx) {
            mx += a.at(y + dy, x + dx, c);
            my += b.at(y + dy, x + dx, c);
          }
        }
        mx /= win * win;
        my /= win * win;
        double vx = 0, vy = 0, cov = 0;
        for (int dy = 0; dy < win; ++dy) {
          for (int dx = 0; dx < win; ++dx) {
            const double da = a.at(y + dy, x + dx, c) - mx;
            const double db = b.at(y + dy, x + dx, c) - my;
            vx += da * da;
            vy += db * db;
            cov += da * db;
          }
        }
        vx /= win * win;
        vy /= win * win;
        cov /= win * win;
        channel += (2 * mx * my + c1) * (2 * cov + c2) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
        count++;
      }
    }
    total += channel / count;
  }
  return total / a.channels;
}

}  // namespace

TEST_CASE("psnr: identity, closed form, symmetry") {
  Pcg32 rng(1);
  const ImageD a = random_image(8, 8, rng);
  CHECK(std::isinf(psnr(a, a)));

  // Uniform squared error of 0.01 -> exactly 20 dB.
  ImageD b = a;
  for (auto& v : b.data) v += 0.1;
  CHECK(std::abs(psnr(a, b) - 20.0) < 1e-9);
  CHECK(psnr(a, b) == psnr(b, a));

  ImageD small(4, 4, 3);
  CHECK_THROWS_AS(psnr(a, small), ValidationError);
}

TEST_CASE("psnr strictly decreases with growing noise amplitude") {
  Pcg32 rng(2);
  const ImageD clean = random_image(12, 12, rng);
  double last = std::numeric_limits<double>::infinity();
  for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    ImageD noisy = clean;
    Pcg32 noise_rng(7);
    for (auto& v : noisy.data) v += amp * (2.0 * noise_rng.next_double() - 1.0);
    const double p = psnr(clean, noisy);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ssim: identity is exactly one, symmetric to 1e-12") {
  Pcg32 rng(3);
  const ImageD a = random_image(16, 16, rng);
  CHECK(ssim(a, a) == 1.0);

  const ImageD b = random_image(16, 16, rng);
  CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-12);

  ImageD c0(16, 16, 3, 0.25);
  ImageD c1(16, 16, 3, 0.75);
  const double s = ssim(c0, c1);
  CHECK(s < 1.0);
  CHECK(s == doctest::Approx(ssim(c1, c0)).epsilon(1e-12));

  ImageD tiny(6, 6, 3);
  CHECK_THROWS_AS(ssim(tiny, tiny), ValidationError);
}

TEST_CASE("ssim matches the direct-formula oracle on random pairs") {
  Pcg32 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const ImageD a = random_image(16, 16, rng);
    ImageD b = a;
    for (auto& v : b.data) v = std::clamp(v + 0.15 * (rng.next_double() - 0.5), 0.0, 1.0);
    CHECK(std::abs(ssim(a, b) - ssim_direct(a, b)) < 1e-6);
  }
}

TEST_CASE("report CSV carries per-view rows, footer means, and inf sentinel") {
  MetricReport report;
  report.view_ids = {0, 1};
  report.psnr_db = {std::numeric_limits<double>::infinity(), 20.0};
  report.ssim_val = {1.0, 0.5};
  report.finalize();
  CHECK(std::isinf(report.mean_psnr));
  CHECK(report.mean_ssim == doctest::Approx(0.75));

  const auto path = std::filesystem::temp_directory_path() / "mpnerf_report_test.csv";
  report.write_csv(path.string());
  const std::string text = read_text_file(path.string());
  CHECK(text.find("view_id,psnr_db,ssim\n") == 0);
  CHECK(text.find("0,inf,1.000000\n") != std::string::npos);
  CHECK(text.find("mean_psnr,inf\n") != std::string::npos);
  CHECK(text.find("mean_ssim,0.750000\n") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("eval_scene reports per-view metrics without touching parameters") {
  const ToyScene scene = make_desk_scene();
  ReferenceSet refs;
  std::vector<EvalView> views;
  for (int i = 0; i < 4; ++i) {
    Camera cam;
    cam.width = 16;
    cam.height = 16;
    cam.focal = 20.0;
    cam.pose = toy_camera_pose(1.1 * i, 0.5, 4.0);
    const ImageF rgba = render_toy_view(scene, cam);
    ImageF rgb(16, 16, 3);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        const float alpha = rgba.at(y, x, 3);
        for (int ch = 0; ch < 3; ++ch) {
          rgb.at(y, x, ch) = alpha * rgba.at(y, x, ch) + (1.0f - alpha);
        }
      }
    }
    if (i < 2) {
      refs.images.push_back(ReferenceImage{rgb, cam});
    } else {
      views.push_back(EvalView{cam, rgb});
    }
  }
  refs.validate();

  Architecture arch = Architecture::multiplane(2, FeatureMode::Standard);
  arch.hidden = {16, 16};
  arch.skip_layer = 1;
  const Params<float> params = init_params<float>(arch, 3);
  std::string before;
  for (const auto& layer : params.layers) {
    before.append(reinterpret_cast<const char*>(layer.w.data()), layer.w.size() * sizeof(float));
  }

  RenderConfig config;
  config.n_samples = 8;
  ThreadPool pool(2);
  const MetricReport report = eval_scene(params, refs, views, config, pool);
  REQUIRE(report.view_ids.size() == 2);
  CHECK(report.mean_psnr ==
        doctest::Approx(0.5 * (report.psnr_db[0] + report.psnr_db[1])).epsilon(1e-12));
  CHECK(report.mean_ssim ==
        doctest::Approx(0.5 * (report.ssim_val[0] + report.ssim_val[1])).epsilon(1e-12));

  std::string after;
  for (const auto& layer : params.layers) {
    after.append(reinterpret_cast<const char*>(layer.w.data()), layer.w.size() * sizeof(float));
  }
  CHECK(before == after);

  CHECK_THROWS_AS(eval_scene(params, refs, {}, config, pool), ValidationError);
}
