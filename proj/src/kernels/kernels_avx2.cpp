// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA kernels. Every output element is an FMA chain in fixed k (or m)
// order, so results match across any batch split; the scalar tail paths use
// std::fmaf to keep the same fused chain as the vector lanes.

#include "mpnerf/kernels.hpp"

#ifdef MPNERF_X86

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace mpnerf::simd::avx2 {

namespace {

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x1));
  return _mm_cvtss_f32(s);
}

// Column range [j0, n) of one gemm_nn row.
inline void nn_row_tail(const float* arow, const float* b, float* crow, int k, int n, int j0,
                        bool accumulate) {
  int j = j0;
  for (; j + 8 <= n; j += 8) {
    __m256 c0 = accumulate ? _mm256_loadu_ps(crow + j) : _mm256_setzero_ps();
    const float* bp = b + j;
    for (int p = 0; p < k; ++p, bp += n) {
      c0 = _mm256_fmadd_ps(_mm256_set1_ps(arow[p]), _mm256_loadu_ps(bp), c0);
    }
    _mm256_storeu_ps(crow + j, c0);
  }
  for (; j < n; ++j) {
    float acc = accumulate ? crow[j] : 0.0f;
    const float* bp = b + j;
    for (int p = 0; p < k; ++p, bp += n) acc = std::fmaf(arow[p], *bp, acc);
    crow[j] = acc;
  }
}

// One row of gemm_nn: crow(N) (+)= arow(K) * B(KxN).
inline void nn_row(const float* arow, const float* b, float* crow, int k, int n, bool accumulate) {
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    __m256 c0 = accumulate ? _mm256_loadu_ps(crow + j) : _mm256_setzero_ps();
    __m256 c1 = accumulate ? _mm256_loadu_ps(crow + j + 8) : _mm256_setzero_ps();
    const float* bp = b + j;
    for (int p = 0; p < k; ++p, bp += n) {
      __m256 av = _mm256_set1_ps(arow[p]);
      c0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp), c0);
      c1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp + 8), c1);
    }
    _mm256_storeu_ps(crow + j, c0);
    _mm256_storeu_ps(crow + j + 8, c1);
  }
  if (j < n) nn_row_tail(arow, b, crow, k, n, j, accumulate);
}

// Four rows at once, identical per-lane chains to nn_row.
inline void nn_row4(const float* a, size_t lda, const float* b, float* c, size_t ldc, int k, int n,
                    bool accumulate) {
  const float* a0 = a;
  const float* a1 = a + lda;
  const float* a2 = a + 2 * lda;
  const float* a3 = a + 3 * lda;
  float* c0 = c;
  float* c1 = c + ldc;
  float* c2 = c + 2 * ldc;
  float* c3 = c + 3 * ldc;
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    __m256 v00 = accumulate ? _mm256_loadu_ps(c0 + j) : _mm256_setzero_ps();
    __m256 v01 = accumulate ? _mm256_loadu_ps(c0 + j + 8) : _mm256_setzero_ps();
    __m256 v10 = accumulate ? _mm256_loadu_ps(c1 + j) : _mm256_setzero_ps();
    __m256 v11 = accumulate ? _mm256_loadu_ps(c1 + j + 8) : _mm256_setzero_ps();
    __m256 v20 = accumulate ? _mm256_loadu_ps(c2 + j) : _mm256_setzero_ps();
    __m256 v21 = accumulate ? _mm256_loadu_ps(c2 + j + 8) : _mm256_setzero_ps();
    __m256 v30 = accumulate ? _mm256_loadu_ps(c3 + j) : _mm256_setzero_ps();
    __m256 v31 = accumulate ? _mm256_loadu_ps(c3 + j + 8) : _mm256_setzero_ps();
    const float* bp = b + j;
    for (int p = 0; p < k; ++p, bp += n) {
      __m256 b0 = _mm256_loadu_ps(bp);
      __m256 b1 = _mm256_loadu_ps(bp + 8);
      __m256 w0 = _mm256_set1_ps(a0[p]);
      __m256 w1 = _mm256_set1_ps(a1[p]);
      __m256 w2 = _mm256_set1_ps(a2[p]);
      __m256 w3 = _mm256_set1_ps(a3[p]);
      v00 = _mm256_fmadd_ps(w0, b0, v00);
      v01 = _mm256_fmadd_ps(w0, b1, v01);
      v10 = _mm256_fmadd_ps(w1, b0, v10);
      v11 = _mm256_fmadd_ps(w1, b1, v11);
      v20 = _mm256_fmadd_ps(w2, b0, v20);
      v21 = _mm256_fmadd_ps(w2, b1, v21);
      v30 = _mm256_fmadd_ps(w3, b0, v30);
      v31 = _mm256_fmadd_ps(w3, b1, v31);
    }
    _mm256_storeu_ps(c0 + j, v00);
    _mm256_storeu_ps(c0 + j + 8, v01);
    _mm256_storeu_ps(c1 + j, v10);
    _mm256_storeu_ps(c1 + j + 8, v11);
    _mm256_storeu_ps(c2 + j, v20);
    _mm256_storeu_ps(c2 + j + 8, v21);
    _mm256_storeu_ps(c3 + j, v30);
    _mm256_storeu_ps(c3 + j + 8, v31);
  }
  if (j < n) {
    nn_row_tail(a0, b, c0, k, n, j, accumulate);
    nn_row_tail(a1, b, c1, k, n, j, accumulate);
    nn_row_tail(a2, b, c2, k, n, j, accumulate);
    nn_row_tail(a3, b, c3, k, n, j, accumulate);
  }
}

}  // namespace

void gemm_nn_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate) {
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    nn_row4(a + static_cast<size_t>(i) * k, k, b, c + static_cast<size_t>(i) * n, n, k, n,
            accumulate);
  }
  for (; i < m; ++i) {
    nn_row(a + static_cast<size_t>(i) * k, b, c + static_cast<size_t>(i) * n, k, n, accumulate);
  }
}

namespace {

// dot(arow, brow) over K: 8 parallel partials, fixed reduction, fmaf tail.
inline float nt_dot(const float* arow, const float* brow, int k) {
  __m256 acc = _mm256_setzero_ps();
  int p = 0;
  for (; p + 8 <= k; p += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(arow + p), _mm256_loadu_ps(brow + p), acc);
  }
  float s = hsum8(acc);
  for (; p < k; ++p) s = std::fmaf(arow[p], brow[p], s);
  return s;
}

}  // namespace

void gemm_nt_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<size_t>(i) * k;
    float* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      float d = nt_dot(arow, b + static_cast<size_t>(j) * k, k);
      crow[j] = accumulate ? crow[j] + d : d;
    }
  }
}

void gemm_tn_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(float) * static_cast<size_t>(k) * n);
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<size_t>(i) * k;
    const float* brow = b + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const float av = arow[p];
      float* crow = c + static_cast<size_t>(p) * n;
      __m256 avv = _mm256_set1_ps(av);
      int j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 cv = _mm256_loadu_ps(crow + j);
        cv = _mm256_fmadd_ps(avv, _mm256_loadu_ps(brow + j), cv);
        _mm256_storeu_ps(crow + j, cv);
      }
      for (; j < n; ++j) crow[j] = std::fmaf(av, brow[j], crow[j]);
    }
  }
}

void bias_add_f32(float* y, const float* bias, int m, int n) {
  for (int i = 0; i < m; ++i) {
    float* row = y + static_cast<size_t>(i) * n;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      _mm256_storeu_ps(row + j, _mm256_add_ps(_mm256_loadu_ps(row + j), _mm256_loadu_ps(bias + j)));
    }
    for (; j < n; ++j) row[j] += bias[j];
  }
}

void relu_f32(float* x, size_t count) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    _mm256_storeu_ps(x + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  }
  for (; i < count; ++i) x[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward_f32(float* dy, const float* y_post, size_t count) {
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(y_post + i), zero, _CMP_GT_OQ);
    _mm256_storeu_ps(dy + i, _mm256_and_ps(_mm256_loadu_ps(dy + i), mask));
  }
  for (; i < count; ++i) {
    if (!(y_post[i] > 0.0f)) dy[i] = 0.0f;
  }
}

void colsum_f32(const float* a, float* out, int m, int n, bool accumulate) {
  if (!accumulate) std::memset(out, 0, sizeof(float) * n);
  for (int i = 0; i < m; ++i) {
    const float* row = a + static_cast<size_t>(i) * n;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      _mm256_storeu_ps(out + j, _mm256_add_ps(_mm256_loadu_ps(out + j), _mm256_loadu_ps(row + j)));
    }
    for (; j < n; ++j) out[j] += row[j];
  }
}

void vadd_f32(float* y, const float* x, size_t count) {
  size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
  }
  for (; i < count; ++i) y[i] += x[i];
}

bool cpu_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace mpnerf::simd::avx2

#endif  // MPNERF_X86
