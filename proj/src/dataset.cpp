// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mpnerf/png_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace mpnerf {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset: cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("dataset: malformed json in " + path + ": " + e.what());
  }
}

Eigen::Matrix4d matrix_from_json(const nlohmann::json& rows, const std::string& path) {
  if (!rows.is_array() || rows.size() != 4) {
    throw DataError("dataset: transform_matrix must be 4x4 in " + path);
  }
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != 4) {
      throw DataError("dataset: transform_matrix must be 4x4 in " + path);
    }
    for (int c = 0; c < 4; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

SceneViews load_nerf_synthetic(const std::string& root_dir, const std::string& split) {
  const std::string json_path = (fs::path(root_dir) / ("transforms_" + split + ".json")).string();
  const nlohmann::json meta = parse_json_file(json_path);
  if (!meta.contains("camera_angle_x")) {
    throw DataError("dataset: missing camera_angle_x in " + json_path);
  }
  if (!meta.contains("frames") || !meta["frames"].is_array()) {
    throw DataError("dataset: missing frames array in " + json_path);
  }
  if (meta["frames"].empty()) {
    throw ValidationError("dataset: empty frames list in " + json_path);
  }

  SceneViews scene;
  scene.split = split;
  scene.camera_angle_x = meta["camera_angle_x"].get<double>();

  for (const auto& frame : meta["frames"]) {
    if (!frame.contains("file_path") || !frame.contains("transform_matrix")) {
      throw DataError("dataset: frame missing file_path/transform_matrix in " + json_path);
    }
    std::string rel = frame["file_path"].get<std::string>();
    if (rel.size() < 4 || rel.substr(rel.size() - 4) != ".png") rel += ".png";
    const std::string img_path = (fs::path(root_dir) / rel).lexically_normal().string();
    if (!fs::exists(img_path)) throw DataError("dataset: missing image " + img_path);

    ImageF image = read_png(img_path);
    Camera camera;
    camera.width = image.width;
    camera.height = image.height;
    camera.focal = 0.5 * image.width / std::tan(0.5 * scene.camera_angle_x);
    camera.pose = matrix_from_json(frame["transform_matrix"], json_path);
    camera.validate();

    scene.images.push_back(std::move(image));
    scene.cameras.push_back(camera);
  }

  const int w = scene.images[0].width;
  const int h = scene.images[0].height;
  for (const auto& img : scene.images) {
    if (img.width != w || img.height != h) {
      throw ValidationError("dataset: views must share one resolution in " + json_path);
    }
  }
  return scene;
}

ImageF composite_alpha(const ImageF& rgba, const std::array<float, 3>& background) {
  if (rgba.channels == 3) return rgba;
  if (rgba.channels != 4) throw ValidationError("composite_alpha: expected RGB or RGBA");
  ImageF out(rgba.width, rgba.height, 3);
  for (int y = 0; y < rgba.height; ++y) {
    for (int x = 0; x < rgba.width; ++x) {
      const float a = rgba.at(y, x, 3);
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = a * rgba.at(y, x, c) + (1.0f - a) * background[c];
      }
    }
  }
  return out;
}

MultiObjectDataset load_multi_object(const std::string& root_dir, const std::string& split) {
  const std::string manifest_path = (fs::path(root_dir) / "manifest.json").string();
  const nlohmann::json manifest = parse_json_file(manifest_path);
  if (!manifest.contains("class") || manifest["class"].get<std::string>().empty()) {
    throw ValidationError("dataset: manifest has no class in " + manifest_path);
  }
  if (!manifest.contains(split) || !manifest[split].is_array()) {
    throw DataError("dataset: manifest missing split '" + split + "' in " + manifest_path);
  }

  MultiObjectDataset dataset;
  dataset.class_name = manifest["class"].get<std::string>();
  for (const auto& id_json : manifest[split]) {
    const std::string id = id_json.get<std::string>();
    const std::string obj_dir = (fs::path(root_dir) / id).string();
    SceneViews views = load_nerf_synthetic(obj_dir, "train");
    if (views.count() != 50) {
      std::cerr << "warning: skipping object " << id << " with " << views.count()
                << " views (expected 50)\n";
      continue;
    }
    dataset.objects.push_back(ObjectViews{id, std::move(views)});
  }
  if (dataset.objects.empty()) {
    throw ValidationError("dataset: no usable objects for split '" + split + "'");
  }
  return dataset;
}

ImageF downsample_box(const ImageF& image, int factor) {
  if (factor < 1) throw ValidationError("downsample: factor must be >= 1");
  if (factor == 1) return image;
  if (image.width % factor != 0 || image.height % factor != 0) {
    throw ValidationError("downsample: dimensions must divide by the factor");
  }
  ImageF out(image.width / factor, image.height / factor, image.channels);
  const float norm = 1.0f / static_cast<float>(factor * factor);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        float acc = 0.0f;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) {
            acc += image.at(y * factor + dy, x * factor + dx, c);
          }
        }
        out.at(y, x, c) = acc * norm;
      }
    }
  }
  return out;
}

Camera downsample_camera(const Camera& camera, int factor) {
  if (camera.width % factor != 0 || camera.height % factor != 0) {
    throw ValidationError("downsample: camera dimensions must divide by the factor");
  }
  Camera out = camera;
  out.width = camera.width / factor;
  out.height = camera.height / factor;
  out.focal = camera.focal / factor;
  return out;
}

SceneViews downsample_views(const SceneViews& views, int factor) {
  SceneViews out;
  out.split = views.split;
  out.camera_angle_x = views.camera_angle_x;
  out.images.reserve(views.images.size());
  out.cameras.reserve(views.cameras.size());
  for (size_t i = 0; i < views.images.size(); ++i) {
    out.images.push_back(downsample_box(views.images[i], factor));
    out.cameras.push_back(downsample_camera(views.cameras[i], factor));
  }
  return out;
}

}  // namespace mpnerf
