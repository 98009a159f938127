// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "mpnerf/core.hpp"

namespace mpnerf {

// Depth threshold below which a point counts as "at or behind" the camera.
inline constexpr double kDepthEps = 1e-6;

// Pinhole camera. Square pixels, principal point at the image center,
// camera-to-world pose with the camera looking down -z, y up, x right
// (the NeRF-synthetic transforms.json convention).
struct Camera {
  int width = 0;
  int height = 0;
  double focal = 0.0;
  Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();

  double cx() const { return 0.5 * width; }
  double cy() const { return 0.5 * height; }
  Eigen::Matrix3d rotation() const { return pose.block<3, 3>(0, 0); }
  Eigen::Vector3d position() const { return pose.block<3, 1>(0, 3); }

  void validate() const;  // throws ValidationError
};

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;  // unit length
  double t_near = 0.0;
  double t_far = 0.0;

  Eigen::Vector3d point_at(double t) const { return origin + t * direction; }
};

// Continuous pixel coordinates of a world point on a camera's image plane.
// uv is always filled (with depth clamped to -kDepthEps when the point is at
// or behind the camera); in_bounds is the only validity signal.
struct ProjectedPoint {
  double u = 0.0;
  double v = 0.0;
  bool in_bounds = false;
  double u_norm = 0.0;  // 2u/width - 1, clamped to [-1, 1]
  double v_norm = 0.0;
};

// Ray through continuous pixel coordinates (u, v); pixel (i, j) center is
// (i + 0.5, j + 0.5). Throws InputDomainError when (u, v) is off the image.
Ray ray_for_pixel(const Camera& camera, double u, double v, double t_near, double t_far);

ProjectedPoint project_point(const Eigen::Vector3d& x, const Camera& camera);

// Rigid inverse [R^T | -R^T t]; throws ValidationError if the rotation block
// is not orthonormal to 1e-6.
Eigen::Matrix4d invert_pose(const Eigen::Matrix4d& pose);

// Camera-to-world pose at `eye` looking toward `target` (world up = +z).
Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up = Eigen::Vector3d(0, 0, 1));

}  // namespace mpnerf
