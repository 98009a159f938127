// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpnerf {

// Error taxonomy; the CLI maps these onto exit codes.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row-major interleaved image, values in [0,1]. channels is 3 (RGB) or 4 (RGBA).
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T(0))
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  size_t index(int y, int x, int c) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  T& at(int y, int x, int c) { return data[index(y, x, c)]; }
  const T& at(int y, int x, int c) const { return data[index(y, x, c)]; }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  template <typename U>
  Image<U> cast() const {
    Image<U> out(width, height, channels);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using ImageF = Image<float>;
using ImageD = Image<double>;

}  // namespace mpnerf
