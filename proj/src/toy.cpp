// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/toy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "mpnerf/png_io.hpp"
#include "mpnerf/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace mpnerf {

namespace {

// Matches the NeRF-synthetic field of view (~39.6 degrees).
constexpr double kToyCameraAngleX = 0.6911112070083618;
constexpr double kToyOrbitRadius = 4.0;

const Eigen::Vector3d kLightDir = Eigen::Vector3d(0.4, -0.6, 0.8).normalized();

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  const ToyPrimitive* prim = nullptr;
};

bool intersect_sphere(const ToyPrimitive& p, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                      Hit& hit) {
  const Eigen::Vector3d oc = o - p.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - p.radius * p.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t < 1e-6) t = -b + sq;
  if (t < 1e-6 || t >= hit.t) return false;
  hit.t = t;
  hit.normal = (o + t * d - p.center).normalized();
  hit.prim = &p;
  return true;
}

bool intersect_box(const ToyPrimitive& p, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                   Hit& hit) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int axis = 0;
  for (int a = 0; a < 3; ++a) {
    const double lo = p.center[a] - p.half[a];
    const double hi = p.center[a] + p.half[a];
    if (std::abs(d[a]) < 1e-12) {
      if (o[a] < lo || o[a] > hi) return false;
      continue;
    }
    double t0 = (lo - o[a]) / d[a];
    double t1 = (hi - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) {
      t_enter = t0;
      axis = a;
    }
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }
  if (t_enter < 1e-6 || t_enter >= hit.t) return false;
  hit.t = t_enter;
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  const Eigen::Vector3d hp = o + t_enter * d;
  n[axis] = hp[axis] > p.center[axis] ? 1.0 : -1.0;
  hit.normal = n;
  hit.prim = &p;
  return true;
}

bool intersect_cylinder(const ToyPrimitive& p, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                        Hit& hit) {
  bool found = false;
  const Eigen::Vector3d oc = o - p.center;
  // Lateral surface: quadratic in the xy plane.
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-12) {
    const double b = oc.x() * d.x() + oc.y() * d.y();
    const double c = oc.x() * oc.x() + oc.y() * oc.y() - p.radius * p.radius;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / a, (-b + sq) / a}) {
        if (t < 1e-6 || t >= hit.t) continue;
        const double z = oc.z() + t * d.z();
        if (std::abs(z) > p.half_height) continue;
        hit.t = t;
        Eigen::Vector3d hp = oc + t * d;
        hit.normal = Eigen::Vector3d(hp.x(), hp.y(), 0.0).normalized();
        hit.prim = &p;
        found = true;
        break;
      }
    }
  }
  // Caps.
  if (std::abs(d.z()) > 1e-12) {
    for (double zcap : {p.half_height, -p.half_height}) {
      const double t = (zcap - oc.z()) / d.z();
      if (t < 1e-6 || t >= hit.t) continue;
      const Eigen::Vector3d hp = oc + t * d;
      if (hp.x() * hp.x() + hp.y() * hp.y() > p.radius * p.radius) continue;
      hit.t = t;
      hit.normal = Eigen::Vector3d(0.0, 0.0, zcap > 0.0 ? 1.0 : -1.0);
      hit.prim = &p;
      found = true;
    }
  }
  return found;
}

std::array<float, 3> shade(const Hit& hit, const Eigen::Vector3d& point) {
  const ToyPrimitive& p = *hit.prim;
  std::array<float, 3> base = p.color;
  if (p.two_tone && point.z() > p.center.z()) base = p.color_top;
  const double lambert = 0.35 + 0.65 * std::max(0.0, hit.normal.dot(kLightDir));
  std::array<float, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::clamp(static_cast<float>(base[c] * lambert), 0.0f, 1.0f);
  }
  return out;
}

}  // namespace

ToyScene make_desk_scene() {
  ToyScene scene;
  ToyPrimitive sphere;
  sphere.kind = ToyPrimitive::Kind::Sphere;
  sphere.center = Eigen::Vector3d(-0.65, -0.45, 0.15);
  sphere.radius = 0.75;
  sphere.color = {0.85f, 0.15f, 0.12f};
  sphere.color_top = {0.95f, 0.8f, 0.1f};
  sphere.two_tone = true;
  scene.primitives.push_back(sphere);

  ToyPrimitive box;
  box.kind = ToyPrimitive::Kind::Box;
  box.center = Eigen::Vector3d(0.8, 0.35, -0.35);
  box.half = Eigen::Vector3d(0.55, 0.5, 0.45);
  box.color = {0.15f, 0.3f, 0.85f};
  scene.primitives.push_back(box);

  ToyPrimitive cyl;
  cyl.kind = ToyPrimitive::Kind::Cylinder;
  cyl.center = Eigen::Vector3d(-0.15, 0.85, 0.05);
  cyl.radius = 0.42;
  cyl.half_height = 0.8;
  cyl.color = {0.1f, 0.75f, 0.3f};
  scene.primitives.push_back(cyl);
  return scene;
}

ToyScene make_random_object(ToyPrimitive::Kind kind, uint64_t seed) {
  Pcg32 rng(seed, 0x746f79ull);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_double(); };
  ToyPrimitive p;
  p.kind = kind;
  p.center = Eigen::Vector3d(uniform(-0.25, 0.25), uniform(-0.25, 0.25), uniform(-0.2, 0.2));
  p.radius = uniform(0.7, 1.15);
  p.half_height = uniform(0.6, 1.1);
  p.half = Eigen::Vector3d(uniform(0.55, 0.95), uniform(0.55, 0.95), uniform(0.55, 0.95));
  // Saturated base color; one channel kept low so objects stay distinct
  // against the white evaluation background.
  const int low = static_cast<int>(rng.next_below(3));
  for (int c = 0; c < 3; ++c) {
    p.color[c] = static_cast<float>(c == low ? uniform(0.02, 0.25) : uniform(0.45, 0.95));
  }
  p.two_tone = rng.next_double() < 0.5;
  for (int c = 0; c < 3; ++c) {
    p.color_top[c] = std::clamp(p.color[(c + 1) % 3] * 0.8f + 0.15f, 0.0f, 1.0f);
  }
  ToyScene scene;
  scene.primitives.push_back(p);
  return scene;
}

Eigen::Matrix4d toy_camera_pose(double azimuth, double elevation, double radius) {
  const Eigen::Vector3d eye(radius * std::cos(elevation) * std::cos(azimuth),
                            radius * std::cos(elevation) * std::sin(azimuth),
                            radius * std::sin(elevation));
  return look_at(eye, Eigen::Vector3d::Zero());
}

ImageF render_toy_view(const ToyScene& scene, const Camera& camera) {
  ImageF image(camera.width, camera.height, 4, 0.0f);
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const Ray ray = ray_for_pixel(camera, x + 0.5, y + 0.5, 0.0, 100.0);
      Hit hit;
      for (const auto& prim : scene.primitives) {
        switch (prim.kind) {
          case ToyPrimitive::Kind::Sphere:
            intersect_sphere(prim, ray.origin, ray.direction, hit);
            break;
          case ToyPrimitive::Kind::Box:
            intersect_box(prim, ray.origin, ray.direction, hit);
            break;
          case ToyPrimitive::Kind::Cylinder:
            intersect_cylinder(prim, ray.origin, ray.direction, hit);
            break;
        }
      }
      if (hit.prim != nullptr) {
        const std::array<float, 3> c = shade(hit, ray.point_at(hit.t));
        image.at(y, x, 0) = c[0];
        image.at(y, x, 1) = c[1];
        image.at(y, x, 2) = c[2];
        image.at(y, x, 3) = 1.0f;
      }
    }
  }
  return image;
}

namespace {

Camera make_toy_camera(int resolution, const Eigen::Matrix4d& pose) {
  Camera cam;
  cam.width = resolution;
  cam.height = resolution;
  cam.focal = 0.5 * resolution / std::tan(0.5 * kToyCameraAngleX);
  cam.pose = pose;
  return cam;
}

nlohmann::json pose_to_json(const Eigen::Matrix4d& pose) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) row.push_back(pose(r, c));
    rows.push_back(row);
  }
  return rows;
}

void write_split(const std::string& dir, const std::string& split, const ToyScene& scene,
                 int n_views, int resolution, Pcg32& rng) {
  fs::create_directories(fs::path(dir) / split);
  nlohmann::json meta;
  meta["camera_angle_x"] = kToyCameraAngleX;
  nlohmann::json frames = nlohmann::json::array();
  for (int i = 0; i < n_views; ++i) {
    // Evenly swept azimuth with jitter; elevation varied per view.
    const double az = 2.0 * M_PI * (i + 0.6 * rng.next_double()) / n_views;
    const double el = (12.0 + 48.0 * rng.next_double()) * M_PI / 180.0;
    const Eigen::Matrix4d pose = toy_camera_pose(az, el, kToyOrbitRadius);
    const Camera cam = make_toy_camera(resolution, pose);
    const ImageF view = render_toy_view(scene, cam);

    const std::string name = "r_" + std::to_string(i);
    write_png((fs::path(dir) / split / (name + ".png")).string(), view);
    nlohmann::json frame;
    frame["file_path"] = "./" + split + "/" + name;
    frame["transform_matrix"] = pose_to_json(pose);
    frames.push_back(frame);
  }
  meta["frames"] = frames;
  std::ofstream out(fs::path(dir) / ("transforms_" + split + ".json"));
  out << meta.dump(1);
  if (!out) throw DataError("toy: failed to write transforms_" + split + ".json");
}

}  // namespace

void generate_toy_scene_dataset(const std::string& dir, const ToyScene& scene, int n_train,
                                int n_test, int resolution, uint64_t seed) {
  if (n_train < 1 || n_test < 1) throw ValidationError("toy: need at least one view per split");
  fs::create_directories(dir);
  Pcg32 rng(stream_key(seed, 0x7363656e65ull), 0x76696577ull);
  write_split(dir, "train", scene, n_train, resolution, rng);
  write_split(dir, "test", scene, n_test, resolution, rng);
}

void generate_toy_multi_dataset(const std::string& dir, ToyPrimitive::Kind kind,
                                int n_train_objects, int n_test_objects, int resolution,
                                uint64_t seed) {
  if (n_train_objects < 1 || n_test_objects < 0) {
    throw ValidationError("toy: invalid object counts");
  }
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["class"] = toy_class_name(kind);
  nlohmann::json train_ids = nlohmann::json::array();
  nlohmann::json test_ids = nlohmann::json::array();

  const int total = n_train_objects + n_test_objects;
  for (int i = 0; i < total; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "obj_%03d", i);
    const std::string id = buf;
    const ToyScene scene = make_random_object(kind, stream_key(seed, 0x6f626aull, i));
    Pcg32 rng(stream_key(seed, 0x6d756c7469ull, i), 0x76696577ull);
    write_split((fs::path(dir) / id).string(), "train", scene, 50, resolution, rng);
    if (i < n_train_objects) {
      train_ids.push_back(id);
    } else {
      test_ids.push_back(id);
    }
  }
  manifest["train"] = train_ids;
  manifest["test"] = test_ids;
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(1);
  if (!out) throw DataError("toy: failed to write manifest.json");
}

const char* toy_class_name(ToyPrimitive::Kind kind) {
  switch (kind) {
    case ToyPrimitive::Kind::Sphere:
      return "spheres";
    case ToyPrimitive::Kind::Box:
      return "cubes";
    default:
      return "cylinders";
  }
}

std::optional<ToyPrimitive::Kind> toy_class_from_name(const std::string& name) {
  if (name == "spheres") return ToyPrimitive::Kind::Sphere;
  if (name == "cubes") return ToyPrimitive::Kind::Box;
  if (name == "cylinders") return ToyPrimitive::Kind::Cylinder;
  return std::nullopt;
}

}  // namespace mpnerf
