// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mpnerf {

namespace {

bool rotation_orthonormal(const Eigen::Matrix3d& r, double tol) {
  Eigen::Matrix3d err = r.transpose() * r - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() < tol;
}

}  // namespace

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw ValidationError("camera: non-positive image size");
  if (!(focal > 0.0)) throw ValidationError("camera: focal must be positive");
  if (!rotation_orthonormal(rotation(), 1e-6)) {
    throw ValidationError("camera: pose rotation not orthonormal");
  }
  if (pose(3, 0) != 0.0 || pose(3, 1) != 0.0 || pose(3, 2) != 0.0 || pose(3, 3) != 1.0) {
    throw ValidationError("camera: pose last row must be [0,0,0,1]");
  }
}

Ray ray_for_pixel(const Camera& camera, double u, double v, double t_near, double t_far) {
  if (!(u >= 0.0 && u < camera.width && v >= 0.0 && v < camera.height)) {
    throw InputDomainError("ray_for_pixel: pixel coordinates outside image");
  }
  if (!(t_near >= 0.0 && t_far > t_near)) {
    throw ValidationError("ray_for_pixel: need 0 <= t_near < t_far");
  }
  // Camera frame: +x right, +y up, looking down -z.
  Eigen::Vector3d dir_cam((u - camera.cx()) / camera.focal, -(v - camera.cy()) / camera.focal,
                          -1.0);
  Eigen::Vector3d dir_world = camera.rotation() * dir_cam;
  Ray ray;
  ray.origin = camera.position();
  ray.direction = dir_world.normalized();
  ray.t_near = t_near;
  ray.t_far = t_far;
  return ray;
}

ProjectedPoint project_point(const Eigen::Vector3d& x, const Camera& camera) {
  Eigen::Matrix3d r = camera.rotation();
  Eigen::Vector3d xc = r.transpose() * (x - camera.position());

  ProjectedPoint p;
  double depth = xc.z();  // visible points have depth < 0
  if (depth >= -kDepthEps) {
    p.in_bounds = false;
    depth = -kDepthEps;
  }
  const double inv = 1.0 / (-depth);
  p.u = camera.cx() + camera.focal * xc.x() * inv;
  p.v = camera.cy() - camera.focal * xc.y() * inv;
  if (xc.z() < -kDepthEps) {
    p.in_bounds = p.u >= 0.0 && p.u < camera.width && p.v >= 0.0 && p.v < camera.height;
  }
  p.u_norm = std::clamp(2.0 * p.u / camera.width - 1.0, -1.0, 1.0);
  p.v_norm = std::clamp(2.0 * p.v / camera.height - 1.0, -1.0, 1.0);
  return p;
}

Eigen::Matrix4d invert_pose(const Eigen::Matrix4d& pose) {
  Eigen::Matrix3d r = pose.block<3, 3>(0, 0);
  if (!rotation_orthonormal(r, 1e-6)) {
    throw ValidationError("invert_pose: rotation block not orthonormal");
  }
  Eigen::Vector3d t = pose.block<3, 1>(0, 3);
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  inv.block<3, 3>(0, 0) = r.transpose();
  inv.block<3, 1>(0, 3) = -(r.transpose() * t);
  return inv;
}

Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up) {
  Eigen::Vector3d zc = (eye - target).normalized();  // camera looks down -z
  Eigen::Vector3d xc = up.cross(zc);
  if (xc.norm() < 1e-12) {
    // Degenerate (looking along up); pick an arbitrary transverse axis.
    xc = Eigen::Vector3d(1, 0, 0).cross(zc);
    if (xc.norm() < 1e-12) xc = Eigen::Vector3d(0, 1, 0).cross(zc);
  }
  xc.normalize();
  Eigen::Vector3d yc = zc.cross(xc);
  Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();
  pose.block<3, 1>(0, 0) = xc;
  pose.block<3, 1>(0, 1) = yc;
  pose.block<3, 1>(0, 2) = zc;
  pose.block<3, 1>(0, 3) = eye;
  return pose;
}

}  // namespace mpnerf
