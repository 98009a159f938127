// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Throughput check for the gemm kernels at decoder-like shapes.

#include <chrono>
#include <cstdio>
#include <vector>

#include "mpnerf/kernels.hpp"
#include "mpnerf/rng.hpp"

using namespace mpnerf;

namespace {

double bench_gemm(simd::Backend backend, int m, int k, int n, int reps) {
  simd::set_backend(backend);
  Pcg32 rng(7);
  std::vector<float> a(static_cast<size_t>(m) * k);
  std::vector<float> b(static_cast<size_t>(k) * n);
  std::vector<float> c(static_cast<size_t>(m) * n);
  for (auto& v : a) v = rng.next_float() - 0.5f;
  for (auto& v : b) v = rng.next_float() - 0.5f;

  simd::gemm_nn(a.data(), b.data(), c.data(), m, k, n, false);  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    simd::gemm_nn(a.data(), b.data(), c.data(), m, k, n, false);
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return 2.0 * m * k * n * reps / sec / 1e9;
}

}  // namespace

int main() {
  struct Shape {
    int m, k, n;
  };
  const Shape shapes[] = {{4096, 60, 96}, {4096, 96, 96}, {4096, 156, 96},
                          {4096, 256, 256}, {1920, 96, 96}, {4096, 96, 1}};
  std::printf("%-18s %12s %12s\n", "shape (MxKxN)", "scalar GF/s", "avx2 GF/s");
  for (const auto& s : shapes) {
    const double flops = 2.0 * s.m * s.k * s.n;
    const int reps = static_cast<int>(2e9 / flops) + 1;
    const double scalar = bench_gemm(simd::Backend::Scalar, s.m, s.k, s.n, std::max(1, reps / 8));
    const double avx = bench_gemm(simd::Backend::Avx2, s.m, s.k, s.n, reps);
    std::printf("%6dx%4dx%4d %12.2f %12.2f\n", s.m, s.k, s.n, scalar, avx);
  }
  simd::set_backend(simd::detect_backend());
  std::printf("active backend: %s\n", simd::backend_name(simd::active_backend()));
  return 0;
}
