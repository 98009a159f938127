// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0
//
// Run-directory bookkeeping: resolved configs and content hashes that make
// every output directory self-describing and re-runnable.

#pragma once

#include <string>

namespace mpnerf {

std::string sha256_hex(const void* data, size_t size);
std::string sha256_hex(const std::string& bytes);

// Hash of a file's bytes; DataError if unreadable.
std::string hash_file(const std::string& path);

// Order-independent-of-traversal hash: files walked in sorted relative-path
// order, chaining (path, content hash) pairs.
std::string hash_path(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mpnerf
