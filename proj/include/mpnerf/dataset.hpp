// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// NeRF-synthetic scene loading (transforms_{split}.json + PNGs) and the
// manifest-based multi-object layout built from the same per-object schema.

#pragma once

#include <string>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/geometry.hpp"
#include "mpnerf/multiplane.hpp"

namespace mpnerf {

struct SceneViews {
  std::vector<ImageF> images;  // RGBA or RGB, matching the files
  std::vector<Camera> cameras;
  std::string split;
  double camera_angle_x = 0.0;

  int count() const { return static_cast<int>(images.size()); }
};

struct ObjectViews {
  std::string id;
  SceneViews views;
};

struct MultiObjectDataset {
  std::string class_name;
  std::vector<ObjectViews> objects;
};

// Parses <root>/transforms_<split>.json and decodes the referenced PNGs.
// focal = 0.5 * width / tan(camera_angle_x / 2).
SceneViews load_nerf_synthetic(const std::string& root_dir, const std::string& split);

// c = alpha * rgb + (1 - alpha) * background. RGB input passes through.
ImageF composite_alpha(const ImageF& rgba, const std::array<float, 3>& background);

// Reads <root>/manifest.json {class, train: [ids], test: [ids]}; every object
// id maps to <root>/<id>/ holding a 50-view transforms_train.json. Objects
// with a different view count are skipped with a warning on stderr.
MultiObjectDataset load_multi_object(const std::string& root_dir, const std::string& split);

// Integer-factor box filter; image dimensions must divide evenly.
ImageF downsample_box(const ImageF& image, int factor);
Camera downsample_camera(const Camera& camera, int factor);
SceneViews downsample_views(const SceneViews& views, int factor);

}  // namespace mpnerf
