// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Analytic toy scenes (Lambert-shaded primitives on a transparent
// background) written in the NeRF-synthetic on-disk layout, so training and
// evaluation can run without any external downloads.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/dataset.hpp"
#include "mpnerf/geometry.hpp"

namespace mpnerf {

struct ToyPrimitive {
  enum class Kind { Sphere, Box, Cylinder };
  Kind kind = Kind::Sphere;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half = Eigen::Vector3d(0.5, 0.5, 0.5);  // box half extents
  double radius = 0.5;                                    // sphere/cylinder
  double half_height = 0.5;                               // cylinder (z axis)
  std::array<float, 3> color = {0.8f, 0.2f, 0.2f};
  std::array<float, 3> color_top = {0.8f, 0.2f, 0.2f};    // z > center.z side
  bool two_tone = false;
};

struct ToyScene {
  std::vector<ToyPrimitive> primitives;
};

// The bundled single-object scene: three primitives with distinct colors.
ToyScene make_desk_scene();

// One random primitive of the class, for multi-object sets.
ToyScene make_random_object(ToyPrimitive::Kind kind, uint64_t seed);

// Camera at `radius` from the origin; azimuth/elevation in radians.
Eigen::Matrix4d toy_camera_pose(double azimuth, double elevation, double radius);

// Analytic render, RGBA with alpha = hit mask.
ImageF render_toy_view(const ToyScene& scene, const Camera& camera);

// Writes transforms_train/test.json plus PNG views of the scene.
void generate_toy_scene_dataset(const std::string& dir, const ToyScene& scene, int n_train,
                                int n_test, int resolution, uint64_t seed);

// Writes manifest.json plus per-object 50-view datasets (train split files).
void generate_toy_multi_dataset(const std::string& dir, ToyPrimitive::Kind kind,
                                int n_train_objects, int n_test_objects, int resolution,
                                uint64_t seed);

const char* toy_class_name(ToyPrimitive::Kind kind);
std::optional<ToyPrimitive::Kind> toy_class_from_name(const std::string& name);

}  // namespace mpnerf
