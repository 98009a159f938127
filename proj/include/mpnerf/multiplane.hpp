// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// The non-trainable scene representation: n posed RGB images. Sample points
// are projected onto every reference image and the bilinearly interpolated
// colors plus normalized projection coordinates (and, in generalization
// mode, the reference camera positions) form the decoder input.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/geometry.hpp"

namespace mpnerf {

enum class FeatureMode { Standard, Generalization };

// Feature layout per reference: [r, g, b, u_norm, v_norm] (+ camera x, y, z).
inline constexpr int kFeaturesStandard = 5;
inline constexpr int kFeaturesGeneralization = 8;

inline int feature_block_size(FeatureMode mode) {
  return mode == FeatureMode::Standard ? kFeaturesStandard : kFeaturesGeneralization;
}
inline int feature_length(int n_refs, FeatureMode mode) {
  return n_refs * feature_block_size(mode);
}

struct ReferenceImage {
  ImageF pixels;  // RGB in [0,1]
  Camera camera;
};

struct ReferenceSet {
  std::vector<ReferenceImage> images;

  int count() const { return static_cast<int>(images.size()); }
  void validate() const;  // throws ValidationError
};

struct FeatureVector {
  std::vector<float> values;
  FeatureMode mode = FeatureMode::Standard;
};

// Bilinear lookup at continuous pixel coordinates. uv is clamped into
// [0.5, dim - 0.5] for the blend; coordinates off the image return black.
// NaN coordinates throw InputDomainError.
template <typename T>
std::array<T, 3> sample_bilinear(const ImageF& image, double u, double v);

extern template std::array<float, 3> sample_bilinear<float>(const ImageF&, double, double);
extern template std::array<double, 3> sample_bilinear<double>(const ImageF&, double, double);

// Writes feature_length(refs.count(), mode) values for world point x.
template <typename T>
void build_features_into(const Eigen::Vector3d& x, const ReferenceSet& refs, FeatureMode mode,
                         T* out);

extern template void build_features_into<float>(const Eigen::Vector3d&, const ReferenceSet&,
                                                FeatureMode, float*);
extern template void build_features_into<double>(const Eigen::Vector3d&, const ReferenceSet&,
                                                 FeatureMode, double*);

FeatureVector build_features(const Eigen::Vector3d& x, const ReferenceSet& refs, FeatureMode mode);

// First k images of a, then the last n-k of b. Both sets must have equal n.
ReferenceSet mix_references(const ReferenceSet& a, const ReferenceSet& b, int k);

}  // namespace mpnerf
