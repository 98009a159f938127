// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Dense kernels behind the decoder and optimizer: scalar reference
// implementations plus AVX2 variants selected at runtime.
//
// Contract required by the renderer's chunking transparency: for a fixed
// backend and fixed (K, N), every output ROW of a gemm_* call is computed
// with an arithmetic chain that does not depend on M or on the row's
// position in the batch. Splitting a batch into chunks therefore yields
// bit-identical rows. Accumulating calls (accumulate=true) extend the
// per-element chain in call order.

#pragma once

#include <cmath>
#include <cstring>
#include <type_traits>

#if defined(__x86_64__) || defined(_M_X64)
#define MPNERF_X86 1
#endif

namespace mpnerf::simd {

enum class Backend { Scalar, Avx2 };

Backend detect_backend();           // best supported, honoring MPNERF_KERNELS env
Backend active_backend();
void set_backend(Backend b);        // test/bench hook
const char* backend_name(Backend b);

// ---------------------------------------------------------------------------
// Scalar reference kernels. Row-major everywhere.
// ---------------------------------------------------------------------------
namespace scalar {

// C(MxN) (+)= A(MxK) * B(KxN)
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    T* crow = c + static_cast<size_t>(i) * n;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = T(0);
    }
    const T* arow = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const T av = arow[p];
      const T* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C(MxN) (+)= A(MxK) * B(NxK)^T
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + static_cast<size_t>(j) * k;
      T acc = T(0);
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

// C(KxN) (+)= A(MxK)^T * B(MxN)   (contraction over rows of A and B)
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * static_cast<size_t>(k) * n);
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    const T* brow = b + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const T av = arow[p];
      T* crow = c + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void bias_add(T* y, const T* bias, int m, int n) {
  for (int i = 0; i < m; ++i) {
    T* row = y + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) row[j] += bias[j];
  }
}

template <typename T>
void relu(T* x, size_t count) {
  for (size_t i = 0; i < count; ++i) x[i] = x[i] > T(0) ? x[i] : T(0);
}

// dy[i] := y_post[i] > 0 ? dy[i] : 0
template <typename T>
void relu_backward(T* dy, const T* y_post, size_t count) {
  for (size_t i = 0; i < count; ++i) {
    if (!(y_post[i] > T(0))) dy[i] = T(0);
  }
}

// out(N) (+)= column sums of A(MxN)
template <typename T>
void colsum(const T* a, T* out, int m, int n, bool accumulate) {
  if (!accumulate) {
    for (int j = 0; j < n; ++j) out[j] = T(0);
  }
  for (int i = 0; i < m; ++i) {
    const T* row = a + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) out[j] += row[j];
  }
}

template <typename T>
void vadd(T* y, const T* x, size_t count) {
  for (size_t i = 0; i < count; ++i) y[i] += x[i];
}

}  // namespace scalar

// ---------------------------------------------------------------------------
// AVX2/FMA variants (float). Compiled in a -mavx2 -mfma TU; only reachable
// when the CPU reports support.
// ---------------------------------------------------------------------------
#ifdef MPNERF_X86
namespace avx2 {
void gemm_nn_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate);
void gemm_nt_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate);
void gemm_tn_f32(const float* a, const float* b, float* c, int m, int k, int n, bool accumulate);
void bias_add_f32(float* y, const float* bias, int m, int n);
void relu_f32(float* x, size_t count);
void relu_backward_f32(float* dy, const float* y_post, size_t count);
void colsum_f32(const float* a, float* out, int m, int n, bool accumulate);
void vadd_f32(float* y, const float* x, size_t count);
bool cpu_supported();
}  // namespace avx2
#endif

// ---------------------------------------------------------------------------
// Dispatch. Double always takes the scalar path (the 64-bit path exists for
// oracles and gradient checks, not throughput).
// ---------------------------------------------------------------------------

template <typename T>
inline void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::gemm_nn_f32(a, b, c, m, k, n, accumulate);
      return;
    }
  }
#endif
  scalar::gemm_nn(a, b, c, m, k, n, accumulate);
}

template <typename T>
inline void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::gemm_nt_f32(a, b, c, m, k, n, accumulate);
      return;
    }
  }
#endif
  scalar::gemm_nt(a, b, c, m, k, n, accumulate);
}

template <typename T>
inline void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::gemm_tn_f32(a, b, c, m, k, n, accumulate);
      return;
    }
  }
#endif
  scalar::gemm_tn(a, b, c, m, k, n, accumulate);
}

template <typename T>
inline void bias_add(T* y, const T* bias, int m, int n) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::bias_add_f32(y, bias, m, n);
      return;
    }
  }
#endif
  scalar::bias_add(y, bias, m, n);
}

template <typename T>
inline void relu(T* x, size_t count) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::relu_f32(x, count);
      return;
    }
  }
#endif
  scalar::relu(x, count);
}

template <typename T>
inline void relu_backward(T* dy, const T* y_post, size_t count) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::relu_backward_f32(dy, y_post, count);
      return;
    }
  }
#endif
  scalar::relu_backward(dy, y_post, count);
}

template <typename T>
inline void colsum(const T* a, T* out, int m, int n, bool accumulate = false) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::colsum_f32(a, out, m, n, accumulate);
      return;
    }
  }
#endif
  scalar::colsum(a, out, m, n, accumulate);
}

template <typename T>
inline void vadd(T* y, const T* x, size_t count) {
#ifdef MPNERF_X86
  if constexpr (std::is_same_v<T, float>) {
    if (active_backend() == Backend::Avx2) {
      avx2::vadd_f32(y, x, count);
      return;
    }
  }
#endif
  scalar::vadd(y, x, count);
}

}  // namespace mpnerf::simd
