// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point: train / render / eval / ablate / interpolate /
// gen-toy. Flags mirror config-file keys one-to-one; precedence is
// flags > config file > defaults. Every run directory receives the fully
// resolved configuration plus a content hash of its inputs, so re-running
// from that file reproduces the outputs bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpnerf/dataset.hpp"
#include "mpnerf/experiments.hpp"
#include "mpnerf/metrics.hpp"
#include "mpnerf/png_io.hpp"
#include "mpnerf/renderer.hpp"
#include "mpnerf/runmeta.hpp"
#include "mpnerf/toy.hpp"
#include "mpnerf/trainer.hpp"

namespace fs = std::filesystem;
using namespace mpnerf;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MPNERF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return ThreadPool::hardware_threads();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::string token;
  for (char c : text + ",") {
    if (c == ',') {
      if (!token.empty()) values.push_back(std::stoi(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (values.empty()) throw UsageError("empty integer list: '" + text + "'");
  return values;
}

std::array<float, 3> parse_background(const std::string& name) {
  if (name == "white") return {1.0f, 1.0f, 1.0f};
  if (name == "black") return {0.0f, 0.0f, 0.0f};
  throw UsageError("background must be 'white' or 'black'");
}

FeatureMode parse_mode(const std::string& name) {
  if (name == "standard") return FeatureMode::Standard;
  if (name == "generalization") return FeatureMode::Generalization;
  throw UsageError("mode must be 'standard' or 'generalization'");
}

SplitStrategy parse_strategy(const std::string& name) {
  if (name == "azimuth") return SplitStrategy::AzimuthStratified;
  if (name == "first") return SplitStrategy::FirstN;
  throw UsageError("split-strategy must be 'azimuth' or 'first'");
}

// ---------------------------------------------------------------------------
// Config-file preprocessing: inject "--key=value" pairs right after the
// subcommand so that explicit flags (parsed later, TakeLast) win.
// ---------------------------------------------------------------------------

std::string json_to_arg(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ",";
      joined += json_to_arg(item);
    }
    return joined;
  }
  return v.dump();
}

std::vector<std::string> inject_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;

  nlohmann::json config;
  try {
    config = nlohmann::json::parse(read_text_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config file: ") + e.what());
  }
  if (!config.is_object()) throw UsageError("config file must hold a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : config.items()) {
    if (key == "config") throw UsageError("config files may not nest 'config'");
    if (key == "command") continue;  // informational echo in resolved configs
    injected.push_back("--" + key + "=" + json_to_arg(value));
  }
  // Insert after the subcommand token (args[0]).
  std::vector<std::string> out;
  if (!args.empty()) out.push_back(args[0]);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
  return out;
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct TrainOpts {
  std::string scene;
  std::string multi;
  std::string out;
  std::string view_split = "train";
  int iters = 20000;
  int batch_rays = 1024;
  int samples = 64;
  int n_refs = 12;
  double lr = 5e-4;
  double lr_final = 5e-5;
  std::string mode = "standard";
  std::string hidden = "256,256,256,256,256,256,256,256";
  int skip_layer = 4;
  int dir_freqs = 4;
  int uv_freqs = 0;
  double near = 2.0;
  double far = 6.0;
  std::string background = "white";
  double sigma_noise = 0.0;
  int chunk_rays = 128;
  int checkpoint_every = 0;
  int log_every = 100;
  std::string strategy = "azimuth";
  int downsample = 1;
  uint64_t seed = 0;
  int threads = 0;
  std::string config;

  TrainConfig to_config() const {
    TrainConfig c;
    c.learning_rate = lr;
    c.lr_final = lr_final;
    c.batch_rays = batch_rays;
    c.iterations = iters;
    c.samples_per_ray = samples;
    c.sigma_noise_std = sigma_noise;
    c.seed = seed;
    c.mode = parse_mode(mode);
    c.n_refs = n_refs;
    c.split = parse_strategy(strategy);
    c.t_near = near;
    c.t_far = far;
    c.background = parse_background(background);
    c.hidden = parse_int_list(hidden);
    c.skip_layer = skip_layer;
    c.dir_freqs = dir_freqs;
    c.uv_freqs = uv_freqs;
    c.chunk_rays = chunk_rays;
    c.log_every = log_every;
    return c;
  }

  nlohmann::json resolved(const std::string& command, const std::string& input_hash) const {
    nlohmann::json j;
    j["command"] = command;
    j["scene"] = scene;
    j["multi"] = multi;
    j["out"] = out;
    j["view-split"] = view_split;
    j["iters"] = iters;
    j["batch-rays"] = batch_rays;
    j["samples"] = samples;
    j["n-refs"] = n_refs;
    j["lr"] = lr;
    j["lr-final"] = lr_final;
    j["mode"] = mode;
    j["hidden"] = hidden;
    j["skip-layer"] = skip_layer;
    j["dir-freqs"] = dir_freqs;
    j["uv-freqs"] = uv_freqs;
    j["near"] = near;
    j["far"] = far;
    j["background"] = background;
    j["sigma-noise"] = sigma_noise;
    j["chunk-rays"] = chunk_rays;
    j["checkpoint-every"] = checkpoint_every;
    j["log-every"] = log_every;
    j["split-strategy"] = strategy;
    j["downsample"] = downsample;
    j["seed"] = seed;
    j["input-hash"] = input_hash;
    return j;
  }
};

void add_train_like_options(CLI::App* sub, TrainOpts& o, bool with_data_flags) {
  auto opt = [](CLI::Option* p) { p->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
  if (with_data_flags) {
    opt(sub->add_option("--scene", o.scene, "Single-object dataset root"));
    opt(sub->add_option("--multi", o.multi, "Multi-object dataset root (manifest.json)"));
    opt(sub->add_option("--out", o.out, "Output run directory")->required());
  }
  opt(sub->add_option("--view-split", o.view_split, "Which transforms split supplies views"));
  opt(sub->add_option("--iters", o.iters, "Optimizer iterations"));
  opt(sub->add_option("--batch-rays", o.batch_rays, "Rays per batch"));
  opt(sub->add_option("--samples", o.samples, "Samples per ray"));
  opt(sub->add_option("--n-refs", o.n_refs, "Reference image count"));
  opt(sub->add_option("--lr", o.lr, "Initial learning rate"));
  opt(sub->add_option("--lr-final", o.lr_final, "Learning rate at the final step"));
  opt(sub->add_option("--mode", o.mode, "standard | generalization"));
  opt(sub->add_option("--hidden", o.hidden, "Comma-separated trunk widths"));
  opt(sub->add_option("--skip-layer", o.skip_layer, "Trunk skip-connection layer (-1 = none)"));
  opt(sub->add_option("--dir-freqs", o.dir_freqs, "View-direction encoding frequencies"));
  opt(sub->add_option("--uv-freqs", o.uv_freqs, "Projected-uv encoding frequencies (0 = raw)"));
  opt(sub->add_option("--near", o.near, "Ray start distance"));
  opt(sub->add_option("--far", o.far, "Ray end distance"));
  opt(sub->add_option("--background", o.background, "white | black"));
  opt(sub->add_option("--sigma-noise", o.sigma_noise, "Training noise on the density head"));
  opt(sub->add_option("--chunk-rays", o.chunk_rays, "Rays per decoder batch"));
  opt(sub->add_option("--checkpoint-every", o.checkpoint_every, "Periodic checkpoint interval"));
  opt(sub->add_option("--log-every", o.log_every, "Metrics logging interval"));
  opt(sub->add_option("--split-strategy", o.strategy, "azimuth | first"));
  opt(sub->add_option("--downsample", o.downsample, "Integer box-filter factor for all views"));
  opt(sub->add_option("--seed", o.seed, "Master seed; all randomness derives from it"));
  opt(sub->add_option("--threads", o.threads, "Worker threads (env MPNERF_THREADS, then cores)"));
  opt(sub->add_option("--config", o.config, "JSON config file; flags override its keys"));
}

SceneViews load_scene_views(const std::string& root, const std::string& split, int downsample) {
  SceneViews views = load_nerf_synthetic(root, split);
  if (downsample > 1) views = downsample_views(views, downsample);
  return views;
}

std::vector<EvalView> eval_views_from_scene(const SceneViews& views,
                                            const std::array<float, 3>& background, int cap) {
  std::vector<EvalView> out;
  const int count = cap > 0 ? std::min(cap, views.count()) : views.count();
  for (int i = 0; i < count; ++i) {
    out.push_back(EvalView{views.cameras[i], composite_alpha(views.images[i], background)});
  }
  return out;
}

void write_refs_json(const std::string& path, const std::vector<std::vector<int>>& indices,
                     const TrainOpts& opts) {
  nlohmann::json j;
  j["strategy"] = opts.strategy;
  j["n_refs"] = opts.n_refs;
  j["source_split"] = opts.view_split;
  j["indices"] = indices;
  write_text_file(path, j.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int run_train(const TrainOpts& opts) {
  if (opts.scene.empty() == opts.multi.empty()) {
    throw UsageError("train: pass exactly one of --scene or --multi");
  }
  const TrainConfig config = opts.to_config();
  config.validate();
  ThreadPool pool(resolve_threads(opts.threads));

  fs::create_directories(opts.out);
  const std::string input_root = opts.scene.empty() ? opts.multi : opts.scene;
  const std::string input_hash = hash_path(input_root);
  write_text_file((fs::path(opts.out) / "resolved_config.json").string(),
                  opts.resolved("train", input_hash).dump(1) + "\n");

  const CheckpointFn on_checkpoint = [&](int step, const Params<float>& params) {
    Checkpoint ckpt;
    ckpt.params = params;
    ckpt.mode = config.mode;
    ckpt.step = step;
    char name[64];
    if (step == config.iterations) {
      std::snprintf(name, sizeof(name), "checkpoint_final.mpnf");
    } else {
      std::snprintf(name, sizeof(name), "checkpoint_%06d.mpnf", step);
    }
    save_checkpoint((fs::path(opts.out) / name).string(), ckpt);
  };

  std::vector<MetricsRow> log;
  if (!opts.scene.empty()) {
    const SceneViews views = load_scene_views(opts.scene, opts.view_split, opts.downsample);
    const TrainResult result =
        train_single_object(views, config, pool, opts.checkpoint_every, on_checkpoint);
    log = result.log;
    write_refs_json((fs::path(opts.out) / "refs.json").string(), {result.ref_indices}, opts);
  } else {
    const MultiObjectDataset dataset = load_multi_object(opts.multi, "train");
    std::vector<SceneViews> objects;
    for (const auto& object : dataset.objects) {
      objects.push_back(opts.downsample > 1 ? downsample_views(object.views, opts.downsample)
                                            : object.views);
    }
    const MultiTrainResult result =
        train_multi_object(objects, config, pool, opts.checkpoint_every, on_checkpoint);
    log = result.log;
    write_refs_json((fs::path(opts.out) / "refs.json").string(), result.ref_indices, opts);
  }
  write_metrics_csv((fs::path(opts.out) / "metrics.csv").string(), log);
  std::printf("trained %d iterations; final loss %.6g; run directory: %s\n", config.iterations,
              log.empty() ? 0.0 : log.back().loss, opts.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// render / interpolate / eval shared plumbing
// ---------------------------------------------------------------------------

struct RunArtifacts {
  Checkpoint checkpoint;
  TrainOpts train_opts;  // reconstructed from resolved_config.json
  std::vector<std::vector<int>> ref_indices;
};

TrainOpts train_opts_from_json(const nlohmann::json& j) {
  TrainOpts o;
  o.scene = j.value("scene", "");
  o.multi = j.value("multi", "");
  o.view_split = j.value("view-split", "train");
  o.iters = j.value("iters", o.iters);
  o.batch_rays = j.value("batch-rays", o.batch_rays);
  o.samples = j.value("samples", o.samples);
  o.n_refs = j.value("n-refs", o.n_refs);
  o.lr = j.value("lr", o.lr);
  o.lr_final = j.value("lr-final", o.lr_final);
  o.mode = j.value("mode", o.mode);
  o.hidden = j.value("hidden", o.hidden);
  o.skip_layer = j.value("skip-layer", o.skip_layer);
  o.dir_freqs = j.value("dir-freqs", o.dir_freqs);
  o.uv_freqs = j.value("uv-freqs", o.uv_freqs);
  o.near = j.value("near", o.near);
  o.far = j.value("far", o.far);
  o.background = j.value("background", o.background);
  o.sigma_noise = j.value("sigma-noise", o.sigma_noise);
  o.chunk_rays = j.value("chunk-rays", o.chunk_rays);
  o.strategy = j.value("split-strategy", o.strategy);
  o.downsample = j.value("downsample", o.downsample);
  o.seed = j.value("seed", o.seed);
  return o;
}

RunArtifacts load_run(const std::string& run_dir, const std::string& checkpoint_override) {
  RunArtifacts run;
  const std::string ckpt_path = checkpoint_override.empty()
                                    ? (fs::path(run_dir) / "checkpoint_final.mpnf").string()
                                    : checkpoint_override;
  run.checkpoint = load_checkpoint(ckpt_path);
  run.train_opts = train_opts_from_json(
      nlohmann::json::parse(read_text_file((fs::path(run_dir) / "resolved_config.json").string())));
  const nlohmann::json refs =
      nlohmann::json::parse(read_text_file((fs::path(run_dir) / "refs.json").string()));
  run.ref_indices = refs.at("indices").get<std::vector<std::vector<int>>>();
  return run;
}

ReferenceSet refs_for_scene(const SceneViews& views, const std::vector<int>& indices,
                            const std::array<float, 3>& background) {
  return make_reference_set(views, indices, background);
}

RenderConfig render_config_from(const TrainOpts& train_opts, int samples_override,
                                uint64_t seed_override, bool seed_given) {
  RenderConfig config;
  config.n_samples = samples_override > 0 ? samples_override : train_opts.samples;
  config.t_near = train_opts.near;
  config.t_far = train_opts.far;
  config.background = parse_background(train_opts.background);
  config.mode = parse_mode(train_opts.mode);
  config.seed = seed_given ? seed_override : train_opts.seed;
  config.chunk_rays = train_opts.chunk_rays;
  return config;
}

std::vector<Camera> poses_from_spec(const std::string& spec, const std::string& scene,
                                    const TrainOpts& train_opts, int max_poses) {
  std::vector<Camera> cameras;
  if (spec.rfind("orbit:", 0) == 0) {
    const int n = std::stoi(spec.substr(6));
    if (n < 1) throw UsageError("orbit pose count must be positive");
    const SceneViews ref_views =
        load_scene_views(scene, train_opts.view_split, train_opts.downsample);
    Camera base = ref_views.cameras[0];
    for (int i = 0; i < n; ++i) {
      base.pose = toy_camera_pose(2.0 * M_PI * i / n, 30.0 * M_PI / 180.0, 4.0);
      cameras.push_back(base);
    }
  } else {
    const SceneViews views = load_scene_views(scene, spec, train_opts.downsample);
    cameras = views.cameras;
  }
  if (max_poses > 0 && static_cast<int>(cameras.size()) > max_poses) {
    cameras.resize(max_poses);
  }
  return cameras;
}

struct RenderOpts {
  std::string run;
  std::string checkpoint;
  std::string scene;
  std::string out;
  std::string poses = "test";
  int max_poses = 0;
  std::string mix;
  int mix_k = -1;
  int samples = 0;
  uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string config;
};

int run_render(const RenderOpts& opts) {
  const RunArtifacts run = load_run(opts.run, opts.checkpoint);
  const TrainOpts& train_opts = run.train_opts;
  ThreadPool pool(resolve_threads(opts.threads));

  const SceneViews scene_views =
      load_scene_views(opts.scene, train_opts.view_split, train_opts.downsample);
  const std::array<float, 3> background = parse_background(train_opts.background);
  ReferenceSet refs = refs_for_scene(scene_views, run.ref_indices.at(0), background);

  if (!opts.mix.empty()) {
    if (opts.mix_k < 0) throw UsageError("--mix requires --mix-k");
    const SceneViews other =
        load_scene_views(opts.mix, train_opts.view_split, train_opts.downsample);
    const ViewSplit split = split_views(other.cameras, static_cast<int>(refs.images.size()),
                                        parse_strategy(train_opts.strategy));
    const ReferenceSet other_refs = refs_for_scene(other, split.ref_indices, background);
    refs = mix_references(refs, other_refs, opts.mix_k);
  }

  const RenderConfig config =
      render_config_from(train_opts, opts.samples, opts.seed, opts.seed_given);
  const std::vector<Camera> cameras =
      poses_from_spec(opts.poses, opts.scene, train_opts, opts.max_poses);

  fs::create_directories(opts.out);
  const Params<float>& params = run.checkpoint.params;
  for (size_t i = 0; i < cameras.size(); ++i) {
    const ImageF image = render_image(params, refs, cameras[i], config, pool);
    char name[64];
    std::snprintf(name, sizeof(name), "render_%03zu.png", i);
    write_png((fs::path(opts.out) / name).string(), image);
  }
  std::printf("wrote %zu renders to %s\n", cameras.size(), opts.out.c_str());
  return 0;
}

struct InterpolateOpts {
  std::string run;
  std::string scene;
  std::string mix_scene;
  std::string out;
  std::string ks = "0,20,40,60,80";  // percent of n
  std::string poses = "test";
  int pose_index = 0;
  int samples = 0;
  uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string config;
};

int run_interpolate(const InterpolateOpts& opts) {
  const RunArtifacts run = load_run(opts.run, "");
  const TrainOpts& train_opts = run.train_opts;
  ThreadPool pool(resolve_threads(opts.threads));

  const std::array<float, 3> background = parse_background(train_opts.background);
  const SceneViews scene_a =
      load_scene_views(opts.scene, train_opts.view_split, train_opts.downsample);
  const SceneViews scene_b =
      load_scene_views(opts.mix_scene, train_opts.view_split, train_opts.downsample);
  const ReferenceSet refs_a = refs_for_scene(scene_a, run.ref_indices.at(0), background);
  const ViewSplit split_b = split_views(scene_b.cameras, static_cast<int>(refs_a.images.size()),
                                        parse_strategy(train_opts.strategy));
  const ReferenceSet refs_b = refs_for_scene(scene_b, split_b.ref_indices, background);

  const std::vector<Camera> cameras =
      poses_from_spec(opts.poses, opts.scene, train_opts, 0);
  if (opts.pose_index < 0 || opts.pose_index >= static_cast<int>(cameras.size())) {
    throw UsageError("pose index out of range");
  }
  const RenderConfig config =
      render_config_from(train_opts, opts.samples, opts.seed, opts.seed_given);

  fs::create_directories(opts.out);
  const int n = static_cast<int>(refs_a.images.size());
  for (int percent : parse_int_list(opts.ks)) {
    if (percent < 0 || percent > 100) throw UsageError("mix percentages must be in [0, 100]");
    const int k = static_cast<int>(std::lround(percent / 100.0 * n));
    const ReferenceSet mixed = mix_references(refs_a, refs_b, k);
    const ImageF image =
        render_image(run.checkpoint.params, mixed, cameras[opts.pose_index], config, pool);
    char name[64];
    std::snprintf(name, sizeof(name), "mix_%03d.png", percent);
    write_png((fs::path(opts.out) / name).string(), image);
  }
  std::printf("wrote mix sweep to %s\n", opts.out.c_str());
  return 0;
}

struct EvalOpts {
  std::string run;
  std::string scene;
  std::string split = "test";
  std::string out;
  int max_views = 0;
  bool cross = false;
  std::string runs;
  std::string multis;
  int eval_views = 5;
  int samples = 0;
  uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string config;
};

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (char c : text + ",") {
    if (c == ',') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  return out;
}

int run_eval(const EvalOpts& opts) {
  ThreadPool pool(resolve_threads(opts.threads));

  if (opts.cross) {
    const std::vector<std::string> runs = split_commas(opts.runs);
    const std::vector<std::string> multis = split_commas(opts.multis);
    if (runs.empty() || runs.size() != multis.size()) {
      throw UsageError("--cross needs matching --runs and --multis lists");
    }
    std::vector<std::string> classes;
    std::vector<MultiObjectDataset> datasets;
    for (const auto& root : multis) {
      datasets.push_back(load_multi_object(root, "test"));
      classes.push_back(datasets.back().class_name);
    }
    std::vector<CrossClassCell> cells;
    for (size_t r = 0; r < runs.size(); ++r) {
      const RunArtifacts run = load_run(runs[r], "");
      const TrainConfig protocol = run.train_opts.to_config();
      const RenderConfig config =
          render_config_from(run.train_opts, opts.samples, opts.seed, opts.seed_given);
      for (size_t c = 0; c < datasets.size(); ++c) {
        const MetricReport report = eval_cross_class(run.checkpoint.params, datasets[c], protocol,
                                                     config, opts.eval_views, pool);
        cells.push_back(CrossClassCell{classes[r], classes[c], report.mean_psnr});
      }
    }
    write_cross_class_csv(opts.out, classes, cells);
    std::printf("wrote cross-class matrix to %s\n", opts.out.c_str());
    return 0;
  }

  const RunArtifacts run = load_run(opts.run, "");
  const TrainOpts& train_opts = run.train_opts;
  const std::array<float, 3> background = parse_background(train_opts.background);
  const SceneViews ref_views =
      load_scene_views(opts.scene, train_opts.view_split, train_opts.downsample);
  const ReferenceSet refs = refs_for_scene(ref_views, run.ref_indices.at(0), background);
  const SceneViews test_views = load_scene_views(opts.scene, opts.split, train_opts.downsample);
  const std::vector<EvalView> views =
      eval_views_from_scene(test_views, background, opts.max_views);

  const RenderConfig config =
      render_config_from(train_opts, opts.samples, opts.seed, opts.seed_given);
  const MetricReport report = eval_scene(run.checkpoint.params, refs, views, config, pool);
  report.write_csv(opts.out);
  std::printf("mean PSNR %.3f dB, mean SSIM %.4f over %zu views -> %s\n", report.mean_psnr,
              report.mean_ssim, report.view_ids.size(), opts.out.c_str());
  return 0;
}

struct AblateOpts {
  TrainOpts train;
  std::string counts = "3,12";
  std::string resolutions;
  int max_views = 0;
};

int run_ablate(const AblateOpts& opts) {
  if (opts.train.scene.empty()) throw UsageError("ablate: --scene is required");
  ThreadPool pool(resolve_threads(opts.train.threads));
  const SceneViews train_views =
      load_scene_views(opts.train.scene, opts.train.view_split, opts.train.downsample);
  const SceneViews test_views = load_scene_views(opts.train.scene, "test", opts.train.downsample);
  const std::array<float, 3> background = parse_background(opts.train.background);
  const std::vector<EvalView> views =
      eval_views_from_scene(test_views, background, opts.max_views);

  const std::string resolutions =
      opts.resolutions.empty() ? std::to_string(train_views.images[0].width) : opts.resolutions;

  fs::create_directories(opts.train.out);
  const std::string input_hash = hash_path(opts.train.scene);
  nlohmann::json resolved = opts.train.resolved("ablate", input_hash);
  resolved["counts"] = opts.counts;
  resolved["resolutions"] = resolutions;
  write_text_file((fs::path(opts.train.out) / "resolved_config.json").string(),
                  resolved.dump(1) + "\n");

  const std::vector<AblationRow> rows =
      ablate_references(train_views, views, parse_int_list(opts.counts),
                        parse_int_list(resolutions), opts.train.to_config(), pool);
  write_ablation_csv((fs::path(opts.train.out) / "ablation.csv").string(), rows);
  for (const auto& row : rows) {
    std::printf("n_refs=%d resolution=%d mean_psnr=%.3f\n", row.n_refs, row.resolution,
                row.mean_psnr);
  }
  return 0;
}

struct GenToyOpts {
  std::string out;
  std::string kind = "scene";
  std::string class_name = "spheres";
  int res = 100;
  int train_views = 60;
  int test_views = 10;
  int objects_train = 4;
  int objects_test = 2;
  uint64_t seed = 0;
  std::string config;
};

int run_gen_toy(const GenToyOpts& opts) {
  if (opts.kind == "scene") {
    generate_toy_scene_dataset(opts.out, make_desk_scene(), opts.train_views, opts.test_views,
                               opts.res, opts.seed);
    std::printf("wrote toy scene dataset to %s\n", opts.out.c_str());
    return 0;
  }
  if (opts.kind == "multi") {
    const auto kind = toy_class_from_name(opts.class_name);
    if (!kind) throw UsageError("unknown toy class: " + opts.class_name);
    generate_toy_multi_dataset(opts.out, *kind, opts.objects_train, opts.objects_test, opts.res,
                               opts.seed);
    std::printf("wrote toy multi-object dataset to %s\n", opts.out.c_str());
    return 0;
  }
  throw UsageError("gen-toy kind must be 'scene' or 'multi'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MultiPlaneNeRF: image-based radiance fields with a non-trainable representation"};
  app.require_subcommand(1);
  auto opt = [](CLI::Option* p) { p->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "Train a decoder on one scene or many objects");
  add_train_like_options(train, train_opts, true);

  RenderOpts render_opts;
  CLI::App* render = app.add_subcommand("render", "Render novel views from a trained run");
  opt(render->add_option("--run", render_opts.run, "Run directory from 'train'")->required());
  opt(render->add_option("--checkpoint", render_opts.checkpoint, "Checkpoint override"));
  opt(render->add_option("--scene", render_opts.scene, "Dataset supplying reference views")
          ->required());
  opt(render->add_option("--out", render_opts.out, "Output directory")->required());
  opt(render->add_option("--poses", render_opts.poses, "test | train | orbit:N"));
  opt(render->add_option("--max-poses", render_opts.max_poses, "Limit pose count (0 = all)"));
  opt(render->add_option("--mix", render_opts.mix, "Second scene for reference mixing"));
  opt(render->add_option("--mix-k", render_opts.mix_k, "Images taken from the first scene"));
  opt(render->add_option("--samples", render_opts.samples, "Samples per ray override"));
  CLI::Option* render_seed = render->add_option("--seed", render_opts.seed, "Seed override");
  opt(render_seed);
  opt(render->add_option("--threads", render_opts.threads, "Worker threads"));
  opt(render->add_option("--config", render_opts.config, "JSON config file"));

  EvalOpts eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "Score held-out views of a trained run");
  opt(eval->add_option("--run", eval_opts.run, "Run directory"));
  opt(eval->add_option("--scene", eval_opts.scene, "Dataset root"));
  opt(eval->add_option("--split", eval_opts.split, "Evaluation split"));
  opt(eval->add_option("--out", eval_opts.out, "Report CSV path")->required());
  opt(eval->add_option("--max-views", eval_opts.max_views, "Limit view count (0 = all)"));
  eval->add_flag("--cross", eval_opts.cross, "Cross-class matrix over --runs x --multis");
  opt(eval->add_option("--runs", eval_opts.runs, "Comma-separated run directories"));
  opt(eval->add_option("--multis", eval_opts.multis, "Comma-separated multi-object roots"));
  opt(eval->add_option("--eval-views", eval_opts.eval_views, "Held-out views per object"));
  opt(eval->add_option("--samples", eval_opts.samples, "Samples per ray override"));
  CLI::Option* eval_seed = eval->add_option("--seed", eval_opts.seed, "Seed override");
  opt(eval_seed);
  opt(eval->add_option("--threads", eval_opts.threads, "Worker threads"));
  opt(eval->add_option("--config", eval_opts.config, "JSON config file"));

  AblateOpts ablate_opts;
  CLI::App* ablate = app.add_subcommand("ablate", "Sweep reference counts and resolutions");
  add_train_like_options(ablate, ablate_opts.train, true);
  opt(ablate->add_option("--counts", ablate_opts.counts, "Comma-separated reference counts"));
  opt(ablate->add_option("--resolutions", ablate_opts.resolutions,
                         "Comma-separated reference resolutions"));
  opt(ablate->add_option("--max-views", ablate_opts.max_views, "Eval views cap (0 = all)"));

  InterpolateOpts interp_opts;
  CLI::App* interp =
      app.add_subcommand("interpolate", "Render a reference-mixing sweep between two objects");
  opt(interp->add_option("--run", interp_opts.run, "Run directory")->required());
  opt(interp->add_option("--scene", interp_opts.scene, "First object's dataset")->required());
  opt(interp->add_option("--mix-scene", interp_opts.mix_scene, "Second object's dataset")
          ->required());
  opt(interp->add_option("--out", interp_opts.out, "Output directory")->required());
  opt(interp->add_option("--ks", interp_opts.ks, "Mix percentages of n"));
  opt(interp->add_option("--poses", interp_opts.poses, "test | train | orbit:N"));
  opt(interp->add_option("--pose-index", interp_opts.pose_index, "Pose index to render"));
  opt(interp->add_option("--samples", interp_opts.samples, "Samples per ray override"));
  CLI::Option* interp_seed = interp->add_option("--seed", interp_opts.seed, "Seed override");
  opt(interp_seed);
  opt(interp->add_option("--threads", interp_opts.threads, "Worker threads"));
  opt(interp->add_option("--config", interp_opts.config, "JSON config file"));

  GenToyOpts toy_opts;
  CLI::App* gen_toy = app.add_subcommand("gen-toy", "Generate the bundled analytic toy datasets");
  opt(gen_toy->add_option("--out", toy_opts.out, "Output directory")->required());
  opt(gen_toy->add_option("--kind", toy_opts.kind, "scene | multi"));
  opt(gen_toy->add_option("--class", toy_opts.class_name, "spheres | cubes | cylinders"));
  opt(gen_toy->add_option("--res", toy_opts.res, "Image resolution"));
  opt(gen_toy->add_option("--train-views", toy_opts.train_views, "Views in the train split"));
  opt(gen_toy->add_option("--test-views", toy_opts.test_views, "Views in the test split"));
  opt(gen_toy->add_option("--objects-train", toy_opts.objects_train, "Training objects"));
  opt(gen_toy->add_option("--objects-test", toy_opts.objects_test, "Held-out objects"));
  opt(gen_toy->add_option("--seed", toy_opts.seed, "Generator seed"));
  opt(gen_toy->add_option("--config", toy_opts.config, "JSON config file"));

  try {
    std::vector<std::string> args = inject_config_args(argc, argv);
    std::vector<const char*> argv2;
    argv2.push_back(argc > 0 ? argv[0] : "mpnerf");
    for (const auto& a : args) argv2.push_back(a.c_str());
    app.parse(static_cast<int>(argv2.size()), argv2.data());

    render_opts.seed_given = render_seed->count() > 0;
    eval_opts.seed_given = eval_seed->count() > 0;
    interp_opts.seed_given = interp_seed->count() > 0;

    if (train->parsed()) return run_train(train_opts);
    if (render->parsed()) return run_render(render_opts);
    if (eval->parsed()) return run_eval(eval_opts);
    if (ablate->parsed()) return run_ablate(ablate_opts);
    if (interp->parsed()) return run_interpolate(interp_opts);
    if (gen_toy->parsed()) return run_gen_toy(toy_opts);
    throw UsageError("no command selected");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputDomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
