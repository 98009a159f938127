// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/multiplane.hpp"

#include <cmath>

#include "doctest.h"
#include "mpnerf/rng.hpp"
#include "mpnerf/toy.hpp"

using namespace mpnerf;

namespace {

ImageF random_image(int w, int h, Pcg32& rng) {
  ImageF img(w, h, 3);
  for (auto& v : img.data) v = rng.next_float();
  return img;
}

Camera simple_camera(int w, int h, const Eigen::Matrix4d& pose = Eigen::Matrix4d::Identity()) {
  Camera cam;
  cam.width = w;
  cam.height = h;
  cam.focal = 0.8 * w;
  cam.pose = pose;
  return cam;
}

// n cameras on a ring looking at the origin, paired with random images.
ReferenceSet ring_refs(int n, int res, Pcg32& rng) {
  ReferenceSet refs;
  for (int i = 0; i < n; ++i) {
    const double az = 2.0 * M_PI * i / n;
    Camera cam = simple_camera(res, res, toy_camera_pose(az, 0.5, 4.0));
    refs.images.push_back(ReferenceImage{random_image(res, res, rng), cam});
  }
  refs.validate();
  return refs;
}

}  // namespace

TEST_CASE("bilinear sampling at a pixel center returns that pixel") {
  Pcg32 rng(1);
  const ImageF img = random_image(9, 7, rng);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto rgb = sample_bilinear<double>(img, x + 0.5, y + 0.5);
      for (int c = 0; c < 3; ++c) CHECK(rgb[c] == doctest::Approx(img.at(y, x, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bilinear sampling at the midpoint of four centers averages them") {
  Pcg32 rng(2);
  const ImageF img = random_image(4, 4, rng);
  const auto rgb = sample_bilinear<double>(img, 2.0, 2.0);  // between pixels (1,1)..(2,2)
  for (int c = 0; c < 3; ++c) {
    const double mean = 0.25 * (static_cast<double>(img.at(1, 1, c)) + img.at(1, 2, c) +
                                img.at(2, 1, c) + img.at(2, 2, c));
    CHECK(rgb[c] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("bilinear sampling is black off the image and rejects NaN") {
  Pcg32 rng(3);
  const ImageF img = random_image(5, 5, rng);
  const auto rgb = sample_bilinear<float>(img, -10.0, -10.0);
  CHECK(rgb == std::array<float, 3>{0.0f, 0.0f, 0.0f});
  CHECK_THROWS_AS(sample_bilinear<float>(img, std::nan(""), 1.0), InputDomainError);
}

TEST_CASE("bilinear sampling is Lipschitz in the coordinates") {
  Pcg32 rng(4);
  const ImageF img = random_image(12, 12, rng);
  // Max adjacent-pixel difference bounds the slope per axis.
  double lip = 0.0;
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (x + 1 < 12) lip = std::max(lip, static_cast<double>(std::abs(img.at(y, x, c) - img.at(y, x + 1, c))));
        if (y + 1 < 12) lip = std::max(lip, static_cast<double>(std::abs(img.at(y, x, c) - img.at(y + 1, x, c))));
      }
    }
  }
  for (int trial = 0; trial < 300; ++trial) {
    const double u = 0.5 + 11.0 * rng.next_double();
    const double v = 0.5 + 11.0 * rng.next_double();
    const double du = (rng.next_double() - 0.5) * 0.2;
    const double dv = (rng.next_double() - 0.5) * 0.2;
    if (u + du < 0.0 || u + du >= 12.0 || v + dv < 0.0 || v + dv >= 12.0) continue;
    const auto a = sample_bilinear<double>(img, u, v);
    const auto b = sample_bilinear<double>(img, u + du, v + dv);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(a[c] - b[c]) <= lip * (std::abs(du) + std::abs(dv)) + 1e-12);
    }
  }
}

TEST_CASE("feature vectors have length 5n / 8n") {
  Pcg32 rng(5);
  for (int n : {1, 3, 12, 50}) {
    const ReferenceSet refs = ring_refs(n, 8, rng);
    const FeatureVector std_fv = build_features(Eigen::Vector3d(0.1, 0.2, 0.0), refs,
                                                FeatureMode::Standard);
    CHECK(static_cast<int>(std_fv.values.size()) == 5 * n);
    const FeatureVector gen_fv = build_features(Eigen::Vector3d(0.1, 0.2, 0.0), refs,
                                                FeatureMode::Generalization);
    CHECK(static_cast<int>(gen_fv.values.size()) == 8 * n);
  }
}

TEST_CASE("points behind every camera produce black features with clamped uv") {
  Pcg32 rng(6);
  ReferenceSet refs;
  // All cameras at the origin looking down -z; the point sits behind them.
  for (int i = 0; i < 4; ++i) {
    refs.images.push_back(ReferenceImage{random_image(8, 8, rng), simple_camera(8, 8)});
  }
  refs.validate();
  const FeatureVector fv = build_features(Eigen::Vector3d(0.0, 0.0, 5.0), refs,
                                          FeatureMode::Standard);
  for (int i = 0; i < 4; ++i) {
    CHECK(fv.values[i * 5 + 0] == 0.0f);
    CHECK(fv.values[i * 5 + 1] == 0.0f);
    CHECK(fv.values[i * 5 + 2] == 0.0f);
    CHECK(std::abs(fv.values[i * 5 + 3]) <= 1.0f);
    CHECK(std::abs(fv.values[i * 5 + 4]) <= 1.0f);
  }
}

TEST_CASE("permuting references permutes the feature blocks identically") {
  Pcg32 rng(7);
  const ReferenceSet refs = ring_refs(6, 10, rng);
  ReferenceSet permuted;
  const int perm[] = {3, 0, 5, 1, 4, 2};
  for (int idx : perm) permuted.images.push_back(refs.images[idx]);

  const Eigen::Vector3d x(0.3, -0.2, 0.4);
  for (FeatureMode mode : {FeatureMode::Standard, FeatureMode::Generalization}) {
    const int block = feature_block_size(mode);
    const FeatureVector a = build_features(x, refs, mode);
    const FeatureVector b = build_features(x, permuted, mode);
    for (int i = 0; i < 6; ++i) {
      for (int c = 0; c < block; ++c) {
        CHECK(b.values[i * block + c] == a.values[perm[i] * block + c]);
      }
    }
  }
}

TEST_CASE("generalization blocks carry the reference camera positions") {
  Pcg32 rng(8);
  const ReferenceSet refs = ring_refs(3, 8, rng);
  const FeatureVector fv = build_features(Eigen::Vector3d::Zero(), refs,
                                          FeatureMode::Generalization);
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d p = refs.images[i].camera.position();
    CHECK(fv.values[i * 8 + 5] == doctest::Approx(p.x()));
    CHECK(fv.values[i * 8 + 6] == doctest::Approx(p.y()));
    CHECK(fv.values[i * 8 + 7] == doctest::Approx(p.z()));
  }
}

TEST_CASE("points on a reference pixel ray reproduce that pixel's color") {
  Pcg32 rng(9);
  const ReferenceSet refs = ring_refs(4, 16, rng);
  const ReferenceImage& ref = refs.images[1];
  for (int trial = 0; trial < 20; ++trial) {
    const int px = static_cast<int>(rng.next_below(16));
    const int py = static_cast<int>(rng.next_below(16));
    const Ray ray = ray_for_pixel(ref.camera, px + 0.5, py + 0.5, 0.0, 8.0);
    const Eigen::Vector3d x = ray.point_at(2.0 + 3.0 * rng.next_double());
    const FeatureVector fv = build_features(x, refs, FeatureMode::Standard);
    for (int c = 0; c < 3; ++c) {
      CHECK(fv.values[1 * 5 + c] == doctest::Approx(ref.pixels.at(py, px, c)).epsilon(1e-4));
    }
  }
}

TEST_CASE("mix_references keeps the first k of a and the tail of b") {
  Pcg32 rng(10);
  const ReferenceSet a = ring_refs(6, 8, rng);
  const ReferenceSet b = ring_refs(6, 8, rng);

  const ReferenceSet all_a = mix_references(a, b, 6);
  const ReferenceSet all_b = mix_references(a, b, 0);
  for (int i = 0; i < 6; ++i) {
    CHECK(all_a.images[i].pixels.data == a.images[i].pixels.data);
    CHECK(all_b.images[i].pixels.data == b.images[i].pixels.data);
  }

  const ReferenceSet half = mix_references(a, b, 3);
  for (int i = 0; i < 6; ++i) {
    const ReferenceSet& source = i < 3 ? a : b;
    CHECK(half.images[i].pixels.data == source.images[i].pixels.data);
    CHECK(half.images[i].camera.pose == source.images[i].camera.pose);
  }

  ReferenceSet small = a;
  small.images.pop_back();
  CHECK_THROWS_AS(mix_references(small, b, 2), ValidationError);
  CHECK_THROWS_AS(mix_references(a, b, 7), ValidationError);
}

TEST_CASE("reference set validation enforces the invariants") {
  Pcg32 rng(11);
  ReferenceSet empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);

  ReferenceSet refs = ring_refs(2, 8, rng);
  refs.images[0].pixels.data[0] = 1.5f;  // out of [0,1]
  CHECK_THROWS_AS(refs.validate(), ValidationError);
}
