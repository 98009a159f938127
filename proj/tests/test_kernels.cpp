// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/kernels.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "mpnerf/rng.hpp"

using namespace mpnerf;

namespace {

std::vector<float> random_vec(size_t n, Pcg32& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = 2.0f * rng.next_float() - 1.0f;
  return v;
}

// Error relative to the conditioning scale sum_k |a_k b_k|; a plain relative
// error would blow up on near-cancelling dot products.
double max_scaled_err(const std::vector<float>& got, const std::vector<float>& want,
                      const std::vector<double>& scale) {
  REQUIRE(got.size() == want.size());
  REQUIRE(got.size() == scale.size());
  double worst = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    const double denom = std::max(scale[i], 1e-6);
    worst = std::max(worst,
                     std::abs(static_cast<double>(got[i]) - static_cast<double>(want[i])) / denom);
  }
  return worst;
}

std::vector<double> abs_scale_nn(const std::vector<float>& a, const std::vector<float>& b, int m,
                                 int k, int n) {
  std::vector<double> s(static_cast<size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = std::abs(static_cast<double>(a[static_cast<size_t>(i) * k + p]));
      for (int j = 0; j < n; ++j) {
        s[static_cast<size_t>(i) * n + j] +=
            av * std::abs(static_cast<double>(b[static_cast<size_t>(p) * n + j]));
      }
    }
  }
  return s;
}

std::vector<double> abs_scale_nt(const std::vector<float>& a, const std::vector<float>& b, int m,
                                 int k, int n) {
  std::vector<double> s(static_cast<size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) {
        acc += std::abs(static_cast<double>(a[static_cast<size_t>(i) * k + p])) *
               std::abs(static_cast<double>(b[static_cast<size_t>(j) * k + p]));
      }
      s[static_cast<size_t>(i) * n + j] = acc;
    }
  }
  return s;
}

std::vector<double> abs_scale_tn(const std::vector<float>& a, const std::vector<float>& b, int m,
                                 int k, int n) {
  std::vector<double> s(static_cast<size_t>(k) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = std::abs(static_cast<double>(a[static_cast<size_t>(i) * k + p]));
      for (int j = 0; j < n; ++j) {
        s[static_cast<size_t>(p) * n + j] +=
            av * std::abs(static_cast<double>(b[static_cast<size_t>(i) * n + j]));
      }
    }
  }
  return s;
}

bool have_avx2() {
#ifdef MPNERF_X86
  return simd::avx2::cpu_supported();
#else
  return false;
#endif
}

}  // namespace

TEST_CASE("scalar gemm_nn matches a double-precision reference") {
  Pcg32 rng(11);
  const int m = 7, k = 13, n = 21;
  const auto a = random_vec(static_cast<size_t>(m) * k, rng);
  const auto b = random_vec(static_cast<size_t>(k) * n, rng);
  std::vector<float> c(static_cast<size_t>(m) * n, 42.0f);
  simd::scalar::gemm_nn(a.data(), b.data(), c.data(), m, k, n, false);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) {
        acc += static_cast<double>(a[static_cast<size_t>(i) * k + p]) *
               static_cast<double>(b[static_cast<size_t>(p) * n + j]);
      }
      CHECK(std::abs(acc - c[static_cast<size_t>(i) * n + j]) < 1e-4);
    }
  }
}

#ifdef MPNERF_X86
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!have_avx2()) return;
  Pcg32 rng(22);
  // Deliberately awkward sizes to cover all remainder paths.
  const int shapes[][3] = {{1, 1, 1},   {3, 5, 7},    {4, 16, 16}, {5, 17, 23},
                           {8, 60, 96}, {13, 96, 41}, {6, 33, 1},  {9, 7, 8}};
  for (const auto& s : shapes) {
    const int m = s[0], k = s[1], n = s[2];
    const auto a = random_vec(static_cast<size_t>(m) * k, rng);
    const auto bt = random_vec(static_cast<size_t>(n) * k, rng);  // for nt
    const auto b = random_vec(static_cast<size_t>(k) * n, rng);
    const auto d = random_vec(static_cast<size_t>(m) * n, rng);   // for tn
    const auto seed_c = random_vec(static_cast<size_t>(m) * n, rng);

    for (bool accumulate : {false, true}) {
      INFO("shape ", m, "x", k, "x", n, " accumulate=", accumulate);
      std::vector<float> c_ref = seed_c, c_avx = seed_c;
      simd::scalar::gemm_nn(a.data(), b.data(), c_ref.data(), m, k, n, accumulate);
      simd::avx2::gemm_nn_f32(a.data(), b.data(), c_avx.data(), m, k, n, accumulate);
      CHECK(max_scaled_err(c_avx, c_ref, abs_scale_nn(a, b, m, k, n)) < 5e-5);

      c_ref = seed_c;
      c_avx = seed_c;
      simd::scalar::gemm_nt(a.data(), bt.data(), c_ref.data(), m, k, n, accumulate);
      simd::avx2::gemm_nt_f32(a.data(), bt.data(), c_avx.data(), m, k, n, accumulate);
      CHECK(max_scaled_err(c_avx, c_ref, abs_scale_nt(a, bt, m, k, n)) < 5e-5);

      std::vector<float> t_ref(static_cast<size_t>(k) * n, 0.5f);
      std::vector<float> t_avx = t_ref;
      simd::scalar::gemm_tn(a.data(), d.data(), t_ref.data(), m, k, n, accumulate);
      simd::avx2::gemm_tn_f32(a.data(), d.data(), t_avx.data(), m, k, n, accumulate);
      CHECK(max_scaled_err(t_avx, t_ref, abs_scale_tn(a, d, m, k, n)) < 5e-5);
    }
  }
}

TEST_CASE("avx2 elementwise kernels match scalar exactly") {
  if (!have_avx2()) return;
  Pcg32 rng(33);
  const size_t n = 1003;
  auto x = random_vec(n, rng);
  auto x2 = x;
  simd::scalar::relu(x.data(), n);
  simd::avx2::relu_f32(x2.data(), n);
  CHECK(x == x2);

  auto dy = random_vec(n, rng);
  auto dy2 = dy;
  simd::scalar::relu_backward(dy.data(), x.data(), n);
  simd::avx2::relu_backward_f32(dy2.data(), x.data(), n);
  CHECK(dy == dy2);

  const int m = 17, cols = 59;
  auto y = random_vec(static_cast<size_t>(m) * cols, rng);
  auto y2 = y;
  const auto bias = random_vec(cols, rng);
  simd::scalar::bias_add(y.data(), bias.data(), m, cols);
  simd::avx2::bias_add_f32(y2.data(), bias.data(), m, cols);
  CHECK(y == y2);

  std::vector<float> s1(cols, 1.0f), s2(cols, 1.0f);
  simd::scalar::colsum(y.data(), s1.data(), m, cols, true);
  simd::avx2::colsum_f32(y2.data(), s2.data(), m, cols, true);
  CHECK(s1 == s2);

  auto acc1 = random_vec(n, rng);
  auto acc2 = acc1;
  simd::scalar::vadd(acc1.data(), dy.data(), n);
  simd::avx2::vadd_f32(acc2.data(), dy.data(), n);
  CHECK(acc1 == acc2);
}

TEST_CASE("gemm rows are bit-identical under any batch split") {
  if (!have_avx2()) return;
  Pcg32 rng(44);
  const int m = 37, k = 61, n = 29;
  const auto a = random_vec(static_cast<size_t>(m) * k, rng);
  const auto b = random_vec(static_cast<size_t>(k) * n, rng);

  std::vector<float> whole(static_cast<size_t>(m) * n);
  simd::avx2::gemm_nn_f32(a.data(), b.data(), whole.data(), m, k, n, false);

  for (int chunk : {1, 2, 3, 5, 8, 36}) {
    std::vector<float> pieces(static_cast<size_t>(m) * n);
    for (int i0 = 0; i0 < m; i0 += chunk) {
      const int rows = std::min(chunk, m - i0);
      simd::avx2::gemm_nn_f32(a.data() + static_cast<size_t>(i0) * k, b.data(),
                              pieces.data() + static_cast<size_t>(i0) * n, rows, k, n, false);
    }
    CHECK(pieces == whole);
  }
}
#endif  // MPNERF_X86

TEST_CASE("backend dispatch honors overrides") {
  const simd::Backend detected = simd::detect_backend();
  simd::set_backend(simd::Backend::Scalar);
  CHECK(simd::active_backend() == simd::Backend::Scalar);
  simd::set_backend(detected);
  CHECK(simd::active_backend() == detected);
}
