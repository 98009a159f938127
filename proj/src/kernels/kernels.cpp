// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpnerf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace mpnerf::simd {

namespace {
std::atomic<int> g_backend{-1};
}

Backend detect_backend() {
  const char* env = std::getenv("MPNERF_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
#ifdef MPNERF_X86
    if (std::strcmp(env, "avx2") == 0 && avx2::cpu_supported()) return Backend::Avx2;
#endif
  }
#ifdef MPNERF_X86
  if (avx2::cpu_supported()) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

Backend active_backend() {
  int b = g_backend.load(std::memory_order_acquire);
  if (b < 0) {
    Backend d = detect_backend();
    g_backend.store(static_cast<int>(d), std::memory_order_release);
    return d;
  }
  return static_cast<Backend>(b);
}

void set_backend(Backend b) {
#ifdef MPNERF_X86
  if (b == Backend::Avx2 && !avx2::cpu_supported()) b = Backend::Scalar;
#else
  b = Backend::Scalar;
#endif
  g_backend.store(static_cast<int>(b), std::memory_order_release);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Avx2:
      return "avx2";
    default:
      return "scalar";
  }
}

}  // namespace mpnerf::simd
