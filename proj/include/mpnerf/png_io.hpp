// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "mpnerf/core.hpp"

namespace mpnerf {

// Reads an 8-bit PNG as floats in [0,1]; 3 or 4 channels depending on the
// file. Gray and palette images are expanded to RGB. Throws DataError.
ImageF read_png(const std::string& path);

// Writes an 8-bit PNG with round(255 * clamp(v, 0, 1)) per channel.
void write_png(const std::string& path, const ImageF& image);

}  // namespace mpnerf
