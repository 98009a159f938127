// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference oracle for the decoder gradients, shared by the unit
// tests and the acceptance suite. All evaluation is at double precision.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mpnerf/decoder.hpp"
#include "mpnerf/rng.hpp"

namespace mpnerf::testutil {

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
};

inline double scalar_loss(const Params<double>& params, const std::vector<double>& z,
                          const std::array<double, 3>& dir, const std::array<double, 4>& upstream) {
  const RadianceOutput<double> out = decoder_forward(params, z, dir);
  return upstream[0] * out.color[0] + upstream[1] * out.color[1] + upstream[2] * out.color[2] +
         upstream[3] * out.sigma;
}

// Central differences with step h over every parameter of the network.
inline GradCheckResult gradcheck(Params<double>& params, const std::vector<double>& z,
                                 const std::array<double, 3>& dir,
                                 const std::array<double, 4>& upstream, double h = 1e-4) {
  DecoderWorkspace<double> ws;
  decoder_forward(params, z, dir, ws);
  const Gradients<double> analytic = decoder_backward(params, upstream, ws);

  GradCheckResult result;
  auto check_tensor = [&](std::vector<double>& values, const std::vector<double>& grad) {
    for (size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = scalar_loss(params, z, dir, upstream);
      values[i] = saved - h;
      const double down = scalar_loss(params, z, dir, upstream);
      values[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      result.max_rel_err = std::max(result.max_rel_err, std::abs(fd - grad[i]) / denom);
      result.checked++;
    }
  };
  for (size_t l = 0; l < params.layers.size(); ++l) {
    check_tensor(params.layers[l].w, analytic.layers[l].w);
    check_tensor(params.layers[l].b, analytic.layers[l].b);
  }
  return result;
}

// A small random decoder configuration plus matching inputs.
struct RandomDecoderCase {
  Params<double> params;
  std::vector<double> z;
  std::array<double, 3> dir;
  std::array<double, 4> upstream;
};

inline RandomDecoderCase random_decoder_case(uint64_t seed) {
  Pcg32 rng(seed, 0x67726164ull);
  Architecture arch;
  arch.n_refs = 1 + static_cast<int>(rng.next_below(3));
  arch.block_size = rng.next_below(2) == 0 ? kFeaturesStandard : kFeaturesGeneralization;
  const int depth = 1 + static_cast<int>(rng.next_below(3));
  arch.hidden.assign(depth, 0);
  for (auto& w : arch.hidden) w = 8 + 2 * static_cast<int>(rng.next_below(6));
  arch.skip_layer = depth >= 2 && rng.next_below(2) == 0 ? 1 : -1;
  arch.dir_freqs = static_cast<int>(rng.next_below(3));
  arch.uv_freqs = rng.next_below(3) == 0 ? 1 : 0;

  RandomDecoderCase c;
  c.params = init_params<double>(arch, rng.next_u64());
  c.z.resize(arch.raw_input_dim());
  for (auto& v : c.z) v = 2.0 * rng.next_double() - 1.0;
  Eigen::Vector3d d(rng.next_double() - 0.5, rng.next_double() - 0.5, rng.next_double() - 0.5);
  if (d.norm() < 1e-6) d = Eigen::Vector3d(1, 0, 0);
  d.normalize();
  c.dir = {d.x(), d.y(), d.z()};
  for (auto& u : c.upstream) u = 2.0 * rng.next_double() - 1.0;
  return c;
}

}  // namespace mpnerf::testutil
