// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/decoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mpnerf/kernels.hpp"
#include "mpnerf/rng.hpp"
#include "json.hpp"

namespace mpnerf {

namespace {

template <typename T>
T softplus(T x) {
  if (x > T(30)) return x;
  return std::log1p(std::exp(x));
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Layer storage order: trunk layers, then sigma, feature, color_hidden,
// color_out heads.
enum HeadOffset { kSigma = 0, kFeature = 1, kColorHidden = 2, kColorOut = 3 };

}  // namespace

int Architecture::input_dim() const {
  if (pos_freqs > 0) return 3 * 2 * pos_freqs;
  if (uv_freqs > 0) return n_refs * (block_size - 2 + 2 * 2 * uv_freqs);
  return n_refs * block_size;
}

void Architecture::validate() const {
  if (hidden.empty()) throw ValidationError("architecture: no hidden layers");
  for (int w : hidden) {
    if (w < 2) throw ValidationError("architecture: hidden width must be >= 2");
  }
  if (skip_layer == 0 || skip_layer >= depth()) {
    throw ValidationError("architecture: skip layer out of range");
  }
  if (dir_freqs < 0 || uv_freqs < 0 || pos_freqs < 0) {
    throw ValidationError("architecture: negative frequency count");
  }
  const bool multiplane_input = n_refs > 0;
  const bool baseline_input = pos_freqs > 0;
  if (multiplane_input == baseline_input) {
    throw ValidationError("architecture: need exactly one of n_refs or pos_freqs");
  }
  if (multiplane_input && block_size != kFeaturesStandard &&
      block_size != kFeaturesGeneralization) {
    throw ValidationError("architecture: block size must be 5 or 8");
  }
}

Architecture Architecture::multiplane(int n_refs, FeatureMode mode) {
  Architecture arch;
  arch.n_refs = n_refs;
  arch.block_size = feature_block_size(mode);
  return arch;
}

Architecture Architecture::baseline() {
  Architecture arch;
  arch.n_refs = 0;
  arch.pos_freqs = 10;
  return arch;
}

std::vector<std::pair<int, int>> layer_dims(const Architecture& arch) {
  arch.validate();
  std::vector<std::pair<int, int>> dims;
  const int in0 = arch.input_dim();
  for (int l = 0; l < arch.depth(); ++l) {
    int in = l == 0 ? in0 : arch.hidden[l - 1];
    if (l == arch.skip_layer) in += in0;
    dims.emplace_back(in, arch.hidden[l]);
  }
  const int w = arch.trunk_width();
  dims.emplace_back(w, 1);                             // sigma head
  dims.emplace_back(w, w);                             // feature
  dims.emplace_back(w + arch.dir_enc_dim(), arch.color_width());
  dims.emplace_back(arch.color_width(), 3);            // color out
  return dims;
}

size_t Architecture::param_count() const {
  size_t n = 0;
  for (auto [in, out] : layer_dims(*this)) n += static_cast<size_t>(in) * out + out;
  return n;
}

template <typename T>
Params<T> init_params(const Architecture& arch, uint64_t seed) {
  Params<T> params;
  params.arch = arch;
  Pcg32 rng(seed, 0x6d70306e65726621ull);
  for (auto [in, out] : layer_dims(arch)) {
    LinearLayer<T> layer;
    layer.in = in;
    layer.out = out;
    layer.w.resize(static_cast<size_t>(in) * out);
    layer.b.assign(out, T(0));
    const double limit = std::sqrt(6.0 / in);
    for (auto& w : layer.w) w = static_cast<T>((2.0 * rng.next_double() - 1.0) * limit);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

template Params<float> init_params<float>(const Architecture&, uint64_t);
template Params<double> init_params<double>(const Architecture&, uint64_t);

template <typename T>
Gradients<T> zero_gradients(const Params<T>& params) {
  Gradients<T> g;
  g.arch = params.arch;
  g.layers.resize(params.layers.size());
  for (size_t i = 0; i < params.layers.size(); ++i) {
    g.layers[i].in = params.layers[i].in;
    g.layers[i].out = params.layers[i].out;
    g.layers[i].w.assign(params.layers[i].w.size(), T(0));
    g.layers[i].b.assign(params.layers[i].b.size(), T(0));
  }
  return g;
}

template Gradients<float> zero_gradients<float>(const Params<float>&);
template Gradients<double> zero_gradients<double>(const Params<double>&);

template <typename T>
void add_gradients(Gradients<T>& into, const Gradients<T>& from) {
  if (into.layers.size() != from.layers.size()) {
    throw ValidationError("add_gradients: shape mismatch");
  }
  for (size_t i = 0; i < into.layers.size(); ++i) {
    simd::vadd(into.layers[i].w.data(), from.layers[i].w.data(), into.layers[i].w.size());
    simd::vadd(into.layers[i].b.data(), from.layers[i].b.data(), into.layers[i].b.size());
  }
}

template void add_gradients<float>(Gradients<float>&, const Gradients<float>&);
template void add_gradients<double>(Gradients<double>&, const Gradients<double>&);

template <typename T>
void positional_encode(const T* v, int dim, int n_freq, T* out) {
  for (int i = 0; i < dim; ++i) {
    const T x = v[i];
    for (int f = 0; f < n_freq; ++f) {
      const T arg = static_cast<T>(std::ldexp(M_PI, f)) * x;
      *out++ = std::sin(arg);
      *out++ = std::cos(arg);
    }
  }
}

template <typename T>
std::vector<T> positional_encode(const std::vector<T>& v, int n_freq) {
  std::vector<T> out(v.size() * 2 * static_cast<size_t>(n_freq));
  positional_encode(v.data(), static_cast<int>(v.size()), n_freq, out.data());
  return out;
}

template void positional_encode<float>(const float*, int, int, float*);
template void positional_encode<double>(const double*, int, int, double*);
template std::vector<float> positional_encode<float>(const std::vector<float>&, int);
template std::vector<double> positional_encode<double>(const std::vector<double>&, int);

namespace {

// Expands one raw feature row into the decoder input row (uv encoding or
// baseline position encoding); plain copy when no encoding is configured.
template <typename T>
void expand_input_row(const Architecture& arch, const T* raw, T* out) {
  if (arch.pos_freqs > 0) {
    positional_encode(raw, 3, arch.pos_freqs, out);
    return;
  }
  if (arch.uv_freqs == 0) {
    std::memcpy(out, raw, sizeof(T) * arch.raw_input_dim());
    return;
  }
  const int block = arch.block_size;
  for (int i = 0; i < arch.n_refs; ++i) {
    const T* src = raw + static_cast<size_t>(i) * block;
    out[0] = src[0];
    out[1] = src[1];
    out[2] = src[2];
    out += 3;
    positional_encode(src + 3, 2, arch.uv_freqs, out);
    out += 2 * 2 * arch.uv_freqs;
    for (int c = 5; c < block; ++c) *out++ = src[c];
  }
}

template <typename T>
void concat_rows(const T* a, int na, const T* b, int nb, int m, T* out) {
  for (int i = 0; i < m; ++i) {
    std::memcpy(out, a + static_cast<size_t>(i) * na, sizeof(T) * na);
    std::memcpy(out + na, b + static_cast<size_t>(i) * nb, sizeof(T) * nb);
    out += na + nb;
  }
}

}  // namespace

template <typename T>
void decoder_forward_batch(const Params<T>& params, const T* z_raw, const T* dirs, int m,
                           const std::type_identity_t<T>* sigma_noise, DecoderWorkspace<T>& ws) {
  const Architecture& arch = params.arch;
  const int depth = arch.depth();
  if (static_cast<int>(params.layers.size()) != depth + 4) {
    throw ValidationError("decoder_forward: layer count does not match architecture");
  }
  const int in0 = arch.input_dim();
  const int raw0 = arch.raw_input_dim();
  const int dir_dim = arch.dir_enc_dim();
  const int w = arch.trunk_width();
  const int cw = arch.color_width();

  ws.m = m;
  ws.zin.resize(static_cast<size_t>(m) * in0);
  ws.dir_enc.resize(static_cast<size_t>(m) * dir_dim);
  ws.h.resize(depth);
  for (int l = 0; l < depth; ++l) ws.h[l].resize(static_cast<size_t>(m) * arch.hidden[l]);
  ws.sigma_pre.resize(m);
  ws.feat.resize(static_cast<size_t>(m) * w);
  ws.ch_in.resize(static_cast<size_t>(m) * (w + dir_dim));
  ws.h2.resize(static_cast<size_t>(m) * cw);
  ws.rgb.resize(static_cast<size_t>(m) * 3);
  ws.sigma.resize(m);

  for (int i = 0; i < m; ++i) {
    expand_input_row(arch, z_raw + static_cast<size_t>(i) * raw0,
                     ws.zin.data() + static_cast<size_t>(i) * in0);
    positional_encode(dirs + static_cast<size_t>(i) * 3, 3, arch.dir_freqs,
                      ws.dir_enc.data() + static_cast<size_t>(i) * dir_dim);
  }

  const T* x = ws.zin.data();
  for (int l = 0; l < depth; ++l) {
    const LinearLayer<T>& layer = params.layers[l];
    if (l == arch.skip_layer) {
      ws.skip_in.resize(static_cast<size_t>(m) * layer.in);
      concat_rows(ws.h[l - 1].data(), arch.hidden[l - 1], ws.zin.data(), in0, m,
                  ws.skip_in.data());
      x = ws.skip_in.data();
    }
    T* y = ws.h[l].data();
    simd::gemm_nn(x, layer.w.data(), y, m, layer.in, layer.out);
    simd::bias_add(y, layer.b.data(), m, layer.out);
    simd::relu(y, static_cast<size_t>(m) * layer.out);
    x = y;
  }

  const T* h_last = ws.h[depth - 1].data();
  {
    const LinearLayer<T>& layer = params.layers[depth + kSigma];
    simd::gemm_nn(h_last, layer.w.data(), ws.sigma_pre.data(), m, w, 1);
    simd::bias_add(ws.sigma_pre.data(), layer.b.data(), m, 1);
    for (int i = 0; i < m; ++i) {
      if (sigma_noise != nullptr) ws.sigma_pre[i] += sigma_noise[i];
      ws.sigma[i] = softplus(ws.sigma_pre[i]);
    }
  }
  {
    const LinearLayer<T>& layer = params.layers[depth + kFeature];
    simd::gemm_nn(h_last, layer.w.data(), ws.feat.data(), m, w, w);
    simd::bias_add(ws.feat.data(), layer.b.data(), m, w);
  }
  concat_rows(ws.feat.data(), w, ws.dir_enc.data(), dir_dim, m, ws.ch_in.data());
  {
    const LinearLayer<T>& layer = params.layers[depth + kColorHidden];
    simd::gemm_nn(ws.ch_in.data(), layer.w.data(), ws.h2.data(), m, layer.in, cw);
    simd::bias_add(ws.h2.data(), layer.b.data(), m, cw);
    simd::relu(ws.h2.data(), static_cast<size_t>(m) * cw);
  }
  {
    const LinearLayer<T>& layer = params.layers[depth + kColorOut];
    simd::gemm_nn(ws.h2.data(), layer.w.data(), ws.rgb.data(), m, cw, 3);
    simd::bias_add(ws.rgb.data(), layer.b.data(), m, 3);
    for (size_t i = 0; i < ws.rgb.size(); ++i) ws.rgb[i] = sigmoid(ws.rgb[i]);
  }
  ws.forward_cached = true;
}

template void decoder_forward_batch<float>(const Params<float>&, const float*, const float*, int,
                                           const float*, DecoderWorkspace<float>&);
template void decoder_forward_batch<double>(const Params<double>&, const double*, const double*,
                                            int, const double*, DecoderWorkspace<double>&);

namespace {

// out(m x nc) := columns [0, nc) of src(m x ns)
template <typename T>
void take_front_columns(const T* src, int ns, int nc, int m, T* out) {
  for (int i = 0; i < m; ++i) {
    std::memcpy(out + static_cast<size_t>(i) * nc, src + static_cast<size_t>(i) * ns,
                sizeof(T) * nc);
  }
}

}  // namespace

template <typename T>
void decoder_backward_batch(const Params<T>& params, const T* upstream, DecoderWorkspace<T>& ws,
                            Gradients<T>& grads) {
  if (!ws.forward_cached) {
    throw UsageError("decoder_backward: no cached forward pass");
  }
  const Architecture& arch = params.arch;
  const int depth = arch.depth();
  const int m = ws.m;
  const int in0 = arch.input_dim();
  const int dir_dim = arch.dir_enc_dim();
  const int w = arch.trunk_width();
  const int cw = arch.color_width();

  ws.d_rgb_pre.resize(static_cast<size_t>(m) * 3);
  ws.d_sigma_pre.resize(m);
  for (int i = 0; i < m; ++i) {
    const T* up = upstream + static_cast<size_t>(i) * 4;
    for (int c = 0; c < 3; ++c) {
      const T y = ws.rgb[static_cast<size_t>(i) * 3 + c];
      ws.d_rgb_pre[static_cast<size_t>(i) * 3 + c] = up[c] * y * (T(1) - y);
    }
    ws.d_sigma_pre[i] = up[3] * sigmoid(ws.sigma_pre[i]);
  }

  // color out
  {
    const LinearLayer<T>& layer = params.layers[depth + kColorOut];
    LinearLayer<T>& g = grads.layers[depth + kColorOut];
    simd::gemm_tn(ws.h2.data(), ws.d_rgb_pre.data(), g.w.data(), m, cw, 3, true);
    simd::colsum(ws.d_rgb_pre.data(), g.b.data(), m, 3, true);
    ws.d_a.resize(static_cast<size_t>(m) * cw);
    simd::gemm_nt(ws.d_rgb_pre.data(), layer.w.data(), ws.d_a.data(), m, 3, cw);
    simd::relu_backward(ws.d_a.data(), ws.h2.data(), static_cast<size_t>(m) * cw);
  }
  // color hidden
  {
    const LinearLayer<T>& layer = params.layers[depth + kColorHidden];
    LinearLayer<T>& g = grads.layers[depth + kColorHidden];
    simd::gemm_tn(ws.ch_in.data(), ws.d_a.data(), g.w.data(), m, layer.in, cw, true);
    simd::colsum(ws.d_a.data(), g.b.data(), m, cw, true);
    ws.d_b.resize(static_cast<size_t>(m) * layer.in);
    simd::gemm_nt(ws.d_a.data(), layer.w.data(), ws.d_b.data(), m, cw, layer.in);
  }
  // feature path only (the dir-encoding slice of ch_in carries no params)
  ws.d_c.resize(static_cast<size_t>(m) * w);
  take_front_columns(ws.d_b.data(), w + dir_dim, w, m, ws.d_c.data());
  const T* h_last = ws.h[depth - 1].data();
  ws.d_a.resize(static_cast<size_t>(m) * w);
  {
    LinearLayer<T>& g = grads.layers[depth + kFeature];
    const LinearLayer<T>& layer = params.layers[depth + kFeature];
    simd::gemm_tn(h_last, ws.d_c.data(), g.w.data(), m, w, w, true);
    simd::colsum(ws.d_c.data(), g.b.data(), m, w, true);
    simd::gemm_nt(ws.d_c.data(), layer.w.data(), ws.d_a.data(), m, w, w);
  }
  {
    LinearLayer<T>& g = grads.layers[depth + kSigma];
    const LinearLayer<T>& layer = params.layers[depth + kSigma];
    simd::gemm_tn(h_last, ws.d_sigma_pre.data(), g.w.data(), m, w, 1, true);
    simd::colsum(ws.d_sigma_pre.data(), g.b.data(), m, 1, true);
    simd::gemm_nt(ws.d_sigma_pre.data(), layer.w.data(), ws.d_a.data(), m, 1, w, true);
  }

  // trunk, gradients flow to parameters only; layer 0 gets no dX (features
  // are non-trainable by construction)
  T* cur = ws.d_a.data();
  for (int l = depth - 1; l >= 0; --l) {
    const LinearLayer<T>& layer = params.layers[l];
    LinearLayer<T>& g = grads.layers[l];
    simd::relu_backward(cur, ws.h[l].data(), static_cast<size_t>(m) * layer.out);
    const T* x_l = l == 0 ? ws.zin.data()
                          : (l == arch.skip_layer ? ws.skip_in.data() : ws.h[l - 1].data());
    simd::gemm_tn(x_l, cur, g.w.data(), m, layer.in, layer.out, true);
    simd::colsum(cur, g.b.data(), m, layer.out, true);
    if (l == 0) break;
    ws.d_b.resize(static_cast<size_t>(m) * layer.in);
    simd::gemm_nt(cur, layer.w.data(), ws.d_b.data(), m, layer.out, layer.in);
    if (l == arch.skip_layer) {
      const int prev = arch.hidden[l - 1];
      ws.d_c.resize(static_cast<size_t>(m) * prev);
      take_front_columns(ws.d_b.data(), layer.in, prev, m, ws.d_c.data());
      std::swap(ws.d_a, ws.d_c);
    } else {
      std::swap(ws.d_a, ws.d_b);
    }
    cur = ws.d_a.data();
  }
}

template void decoder_backward_batch<float>(const Params<float>&, const float*,
                                            DecoderWorkspace<float>&, Gradients<float>&);
template void decoder_backward_batch<double>(const Params<double>&, const double*,
                                             DecoderWorkspace<double>&, Gradients<double>&);

template <typename T>
RadianceOutput<T> decoder_forward(const Params<T>& params, const std::vector<T>& z,
                                  const std::array<T, 3>& dir, DecoderWorkspace<T>& ws,
                                  T sigma_noise) {
  if (static_cast<int>(z.size()) != params.arch.raw_input_dim()) {
    throw ValidationError("decoder_forward: feature length does not match architecture");
  }
  const T noise[1] = {sigma_noise};
  decoder_forward_batch(params, z.data(), dir.data(), 1, sigma_noise == T(0) ? nullptr : noise,
                        ws);
  RadianceOutput<T> out;
  out.color = {ws.rgb[0], ws.rgb[1], ws.rgb[2]};
  out.sigma = ws.sigma[0];
  return out;
}

template <typename T>
RadianceOutput<T> decoder_forward(const Params<T>& params, const std::vector<T>& z,
                                  const std::array<T, 3>& dir, T sigma_noise) {
  DecoderWorkspace<T> ws;
  return decoder_forward(params, z, dir, ws, sigma_noise);
}

template RadianceOutput<float> decoder_forward<float>(const Params<float>&,
                                                      const std::vector<float>&,
                                                      const std::array<float, 3>&,
                                                      DecoderWorkspace<float>&, float);
template RadianceOutput<double> decoder_forward<double>(const Params<double>&,
                                                        const std::vector<double>&,
                                                        const std::array<double, 3>&,
                                                        DecoderWorkspace<double>&, double);
template RadianceOutput<float> decoder_forward<float>(const Params<float>&,
                                                      const std::vector<float>&,
                                                      const std::array<float, 3>&, float);
template RadianceOutput<double> decoder_forward<double>(const Params<double>&,
                                                        const std::vector<double>&,
                                                        const std::array<double, 3>&, double);

template <typename T>
Gradients<T> decoder_backward(const Params<T>& params, const std::array<T, 4>& upstream,
                              DecoderWorkspace<T>& ws) {
  Gradients<T> grads = zero_gradients(params);
  decoder_backward_batch(params, upstream.data(), ws, grads);
  return grads;
}

template Gradients<float> decoder_backward<float>(const Params<float>&,
                                                  const std::array<float, 4>&,
                                                  DecoderWorkspace<float>&);
template Gradients<double> decoder_backward<double>(const Params<double>&,
                                                    const std::array<double, 4>&,
                                                    DecoderWorkspace<double>&);

template <typename T>
RadianceOutput<T> baseline_forward(const Params<T>& params, const std::array<T, 3>& x,
                                   const std::array<T, 3>& dir) {
  if (params.arch.pos_freqs <= 0) {
    throw ValidationError("baseline_forward: architecture is not a coordinate baseline");
  }
  std::vector<T> z(x.begin(), x.end());
  DecoderWorkspace<T> ws;
  return decoder_forward(params, z, dir, ws, T(0));
}

template RadianceOutput<float> baseline_forward<float>(const Params<float>&,
                                                       const std::array<float, 3>&,
                                                       const std::array<float, 3>&);
template RadianceOutput<double> baseline_forward<double>(const Params<double>&,
                                                         const std::array<double, 3>&,
                                                         const std::array<double, 3>&);

// --- checkpoint -------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'M', 'P', 'N', 'F'};
constexpr uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json arch;
  arch["n_refs"] = ckpt.params.arch.n_refs;
  arch["block_size"] = ckpt.params.arch.block_size;
  arch["uv_freqs"] = ckpt.params.arch.uv_freqs;
  arch["pos_freqs"] = ckpt.params.arch.pos_freqs;
  arch["hidden"] = ckpt.params.arch.hidden;
  arch["skip_layer"] = ckpt.params.arch.skip_layer;
  arch["dir_freqs"] = ckpt.params.arch.dir_freqs;
  nlohmann::json header;
  header["arch"] = arch;
  header["mode"] = ckpt.mode == FeatureMode::Generalization ? "generalization" : "standard";
  header["step"] = ckpt.step;
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot open for writing: " + path);
  out.write(kMagic, 4);
  const uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const uint32_t hlen = static_cast<uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hs.data(), hs.size());
  for (const auto& layer : ckpt.params.layers) {
    out.write(reinterpret_cast<const char*>(layer.w.data()), layer.w.size() * sizeof(float));
    out.write(reinterpret_cast<const char*>(layer.b.data()), layer.b.size() * sizeof(float));
  }
  if (!out) throw DataError("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open: " + path);
  char magic[4];
  uint32_t version = 0, hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("checkpoint: bad magic: " + path);
  }
  if (version != kVersion) throw DataError("checkpoint: unsupported version");
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  if (!in) throw DataError("checkpoint: truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad header json: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    const auto& arch = header.at("arch");
    ckpt.params.arch.n_refs = arch.at("n_refs").get<int>();
    ckpt.params.arch.block_size = arch.at("block_size").get<int>();
    ckpt.params.arch.uv_freqs = arch.at("uv_freqs").get<int>();
    ckpt.params.arch.pos_freqs = arch.at("pos_freqs").get<int>();
    ckpt.params.arch.hidden = arch.at("hidden").get<std::vector<int>>();
    ckpt.params.arch.skip_layer = arch.at("skip_layer").get<int>();
    ckpt.params.arch.dir_freqs = arch.at("dir_freqs").get<int>();
    ckpt.mode = header.at("mode").get<std::string>() == "generalization"
                    ? FeatureMode::Generalization
                    : FeatureMode::Standard;
    ckpt.step = header.at("step").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: missing header field: ") + e.what());
  }

  for (auto [din, dout] : layer_dims(ckpt.params.arch)) {
    LinearLayer<float> layer;
    layer.in = din;
    layer.out = dout;
    layer.w.resize(static_cast<size_t>(din) * dout);
    layer.b.resize(dout);
    in.read(reinterpret_cast<char*>(layer.w.data()), layer.w.size() * sizeof(float));
    in.read(reinterpret_cast<char*>(layer.b.data()), layer.b.size() * sizeof(float));
    if (!in) throw DataError("checkpoint: payload shorter than architecture requires");
    ckpt.params.layers.push_back(std::move(layer));
  }
  in.peek();
  if (!in.eof()) throw DataError("checkpoint: payload longer than architecture requires");
  return ckpt;
}

template struct Params<float>;
template struct Params<double>;

}  // namespace mpnerf
