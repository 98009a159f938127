// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/multiplane.hpp"

#include <algorithm>
#include <cmath>

namespace mpnerf {

void ReferenceSet::validate() const {
  if (images.empty()) throw ValidationError("reference set: need at least one image");
  const int w = images[0].pixels.width;
  const int h = images[0].pixels.height;
  for (const auto& ref : images) {
    if (ref.pixels.channels != 3) throw ValidationError("reference set: images must be RGB");
    if (ref.pixels.width != w || ref.pixels.height != h) {
      throw ValidationError("reference set: all images must share one resolution");
    }
    if (ref.pixels.width != ref.camera.width || ref.pixels.height != ref.camera.height) {
      throw ValidationError("reference set: image size does not match its camera");
    }
    ref.camera.validate();
    for (float v : ref.pixels.data) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw ValidationError("reference set: pixel values must lie in [0,1]");
      }
    }
  }
}

template <typename T>
std::array<T, 3> sample_bilinear(const ImageF& image, double u, double v) {
  if (std::isnan(u) || std::isnan(v)) {
    throw InputDomainError("sample_bilinear: NaN coordinates");
  }
  const int w = image.width;
  const int h = image.height;
  if (u < 0.0 || u >= w || v < 0.0 || v >= h) return {T(0), T(0), T(0)};

  const double uc = std::clamp(u, 0.5, w - 0.5);
  const double vc = std::clamp(v, 0.5, h - 0.5);
  const int i0 = std::min(static_cast<int>(std::floor(uc - 0.5)), w - 1);
  const int j0 = std::min(static_cast<int>(std::floor(vc - 0.5)), h - 1);
  const int i1 = std::min(i0 + 1, w - 1);
  const int j1 = std::min(j0 + 1, h - 1);
  const T fu = static_cast<T>(uc - 0.5 - i0);
  const T fv = static_cast<T>(vc - 0.5 - j0);
  const T gu = T(1) - fu;
  const T gv = T(1) - fv;

  std::array<T, 3> rgb;
  for (int c = 0; c < 3; ++c) {
    const T p00 = static_cast<T>(image.at(j0, i0, c));
    const T p01 = static_cast<T>(image.at(j0, i1, c));
    const T p10 = static_cast<T>(image.at(j1, i0, c));
    const T p11 = static_cast<T>(image.at(j1, i1, c));
    rgb[c] = gv * (gu * p00 + fu * p01) + fv * (gu * p10 + fu * p11);
  }
  return rgb;
}

template std::array<float, 3> sample_bilinear<float>(const ImageF&, double, double);
template std::array<double, 3> sample_bilinear<double>(const ImageF&, double, double);

template <typename T>
void build_features_into(const Eigen::Vector3d& x, const ReferenceSet& refs, FeatureMode mode,
                         T* out) {
  const int block = feature_block_size(mode);
  for (int i = 0; i < refs.count(); ++i) {
    const ReferenceImage& ref = refs.images[i];
    const ProjectedPoint p = project_point(x, ref.camera);
    T* dst = out + static_cast<size_t>(i) * block;
    if (p.in_bounds) {
      const std::array<T, 3> rgb = sample_bilinear<T>(ref.pixels, p.u, p.v);
      dst[0] = rgb[0];
      dst[1] = rgb[1];
      dst[2] = rgb[2];
    } else {
      dst[0] = dst[1] = dst[2] = T(0);
    }
    dst[3] = static_cast<T>(p.u_norm);
    dst[4] = static_cast<T>(p.v_norm);
    if (mode == FeatureMode::Generalization) {
      const Eigen::Vector3d cam_pos = ref.camera.position();
      dst[5] = static_cast<T>(cam_pos.x());
      dst[6] = static_cast<T>(cam_pos.y());
      dst[7] = static_cast<T>(cam_pos.z());
    }
  }
}

template void build_features_into<float>(const Eigen::Vector3d&, const ReferenceSet&, FeatureMode,
                                         float*);
template void build_features_into<double>(const Eigen::Vector3d&, const ReferenceSet&, FeatureMode,
                                          double*);

FeatureVector build_features(const Eigen::Vector3d& x, const ReferenceSet& refs, FeatureMode mode) {
  if (refs.count() == 0) throw ValidationError("build_features: empty reference set");
  FeatureVector fv;
  fv.mode = mode;
  fv.values.resize(feature_length(refs.count(), mode));
  build_features_into<float>(x, refs, mode, fv.values.data());
  return fv;
}

ReferenceSet mix_references(const ReferenceSet& a, const ReferenceSet& b, int k) {
  const int n = a.count();
  if (b.count() != n) throw ValidationError("mix_references: sets must have equal size");
  if (k < 0 || k > n) throw ValidationError("mix_references: k out of range");
  ReferenceSet mixed;
  mixed.images.reserve(n);
  for (int i = 0; i < k; ++i) mixed.images.push_back(a.images[i]);
  for (int i = k; i < n; ++i) mixed.images.push_back(b.images[i]);
  return mixed;
}

}  // namespace mpnerf
