// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// The implicit decoder: a small MLP taking the per-sample feature vector
// (or, for the coordinate baseline, the frequency-encoded position) plus an
// encoded viewing direction, producing color and volume density. Forward
// and reverse passes are hand-written on top of the simd kernels; gradients
// flow to parameters only, never to the feature inputs.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "mpnerf/core.hpp"
#include "mpnerf/multiplane.hpp"

namespace mpnerf {

struct Architecture {
  // Input description. n_refs > 0: multiplane features; pos_freqs > 0:
  // coordinate baseline with frequency-encoded xyz.
  int n_refs = 0;
  int block_size = kFeaturesStandard;  // 5 or 8 values per reference
  int uv_freqs = 0;                    // 0 = projected uv enters raw
  int pos_freqs = 0;

  std::vector<int> hidden = {256, 256, 256, 256, 256, 256, 256, 256};
  int skip_layer = 4;  // trunk layer fed [h, input]; -1 disables
  int dir_freqs = 4;

  int raw_input_dim() const { return pos_freqs > 0 ? 3 : n_refs * block_size; }
  int input_dim() const;
  int dir_enc_dim() const { return 3 * 2 * dir_freqs; }
  int depth() const { return static_cast<int>(hidden.size()); }
  int trunk_width() const { return hidden.back(); }
  int color_width() const { return hidden.back() / 2; }
  size_t param_count() const;
  void validate() const;

  static Architecture multiplane(int n_refs, FeatureMode mode);
  static Architecture baseline();
};

template <typename T>
struct LinearLayer {
  int in = 0;
  int out = 0;
  std::vector<T> w;  // (in x out) row-major
  std::vector<T> b;  // (out)
};

template <typename T>
struct Params {
  Architecture arch;
  std::vector<LinearLayer<T>> layers;  // trunk..., sigma, feature, color_hidden, color_out

  size_t param_count() const {
    size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }

  template <typename U>
  Params<U> cast() const {
    Params<U> p;
    p.arch = arch;
    p.layers.resize(layers.size());
    for (size_t i = 0; i < layers.size(); ++i) {
      p.layers[i].in = layers[i].in;
      p.layers[i].out = layers[i].out;
      p.layers[i].w.assign(layers[i].w.begin(), layers[i].w.end());
      p.layers[i].b.assign(layers[i].b.begin(), layers[i].b.end());
    }
    return p;
  }
};

// Gradient accumulators, shape-congruent with Params.
template <typename T>
using Gradients = Params<T>;

template <typename T>
Gradients<T> zero_gradients(const Params<T>& params);

template <typename T>
void add_gradients(Gradients<T>& into, const Gradients<T>& from);

// (in, out) of every linear layer in storage order.
std::vector<std::pair<int, int>> layer_dims(const Architecture& arch);

// He-uniform weights, zero biases; identical output for identical seeds.
template <typename T>
Params<T> init_params(const Architecture& arch, uint64_t seed);

template <typename T>
struct RadianceOutput {
  std::array<T, 3> color{};  // in [0,1], sigmoid head
  T sigma = T(0);            // >= 0, softplus head
};

// Frequency encoding: for each component i, for f = 0..n_freq-1, append
// sin(2^f * pi * v_i), cos(2^f * pi * v_i).
template <typename T>
void positional_encode(const T* v, int dim, int n_freq, T* out);

template <typename T>
std::vector<T> positional_encode(const std::vector<T>& v, int n_freq);

// Scratch + cached activations for one forward/backward batch.
template <typename T>
struct DecoderWorkspace {
  int m = 0;
  bool forward_cached = false;

  std::vector<T> zin;       // decoder layer-0 input after optional encodings
  std::vector<T> dir_enc;
  std::vector<std::vector<T>> h;  // per trunk layer, post-relu
  std::vector<T> skip_in;   // input of the skip layer: [h_prev, zin]
  std::vector<T> sigma_pre; // pre-activation + training noise
  std::vector<T> feat;
  std::vector<T> ch_in;     // [feat, dir_enc]
  std::vector<T> h2;        // color hidden, post-relu
  std::vector<T> rgb;       // (m x 3) post-sigmoid
  std::vector<T> sigma;     // (m)

  std::vector<T> d_a, d_b, d_c, d_rgb_pre, d_sigma_pre;  // backward scratch
};

// z_raw: m rows of arch.raw_input_dim() values (ignored pos baseline uses 3).
// dirs: m unit 3-vectors. sigma_noise: optional m pre-activation offsets.
// Outputs land in ws.rgb / ws.sigma. Rows are computed independently, so any
// chunking of a batch yields bit-identical results.
template <typename T>
void decoder_forward_batch(const Params<T>& params, const T* z_raw, const T* dirs, int m,
                           const std::type_identity_t<T>* sigma_noise, DecoderWorkspace<T>& ws);

// upstream: m rows [dL/dr, dL/dg, dL/db, dL/dsigma]. Accumulates into grads.
// Requires the workspace of a prior forward pass (UsageError otherwise).
template <typename T>
void decoder_backward_batch(const Params<T>& params, const T* upstream, DecoderWorkspace<T>& ws,
                            Gradients<T>& grads);

// Single-sample convenience wrappers.
template <typename T>
RadianceOutput<T> decoder_forward(const Params<T>& params, const std::vector<T>& z,
                                  const std::array<T, 3>& dir, T sigma_noise = T(0));

template <typename T>
RadianceOutput<T> decoder_forward(const Params<T>& params, const std::vector<T>& z,
                                  const std::array<T, 3>& dir, DecoderWorkspace<T>& ws,
                                  T sigma_noise = T(0));

template <typename T>
Gradients<T> decoder_backward(const Params<T>& params, const std::array<T, 4>& upstream,
                              DecoderWorkspace<T>& ws);

// Coordinate baseline: encodes x with arch.pos_freqs before the trunk.
template <typename T>
RadianceOutput<T> baseline_forward(const Params<T>& params, const std::array<T, 3>& x,
                                   const std::array<T, 3>& dir);

// --- checkpoint container -------------------------------------------------

struct Checkpoint {
  Params<float> params;
  FeatureMode mode = FeatureMode::Standard;
  int64_t step = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

extern template struct Params<float>;
extern template struct Params<double>;

}  // namespace mpnerf
