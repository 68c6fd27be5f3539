//
// Copyright 2026 The Orbis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "orbis/matching.hpp"
#include "orbis/quantization.hpp"
#include "orbis/tensor.hpp"

namespace orbis::io {

inline constexpr std::uint32_t kFormatVersion = 1;

// All containers are little-endian and start with a four-byte magic.
//
//   ORBT  version u32, n_tokens u32, n_channels u32, dtype u8 (0 = real32),
//         then n_tokens * n_channels real32 values, row-major.
//   ORBP  version u32, n_tokens u32, pair_count u32,
//         then pair_count * (src u32, dst u32, loss real32).
//   ORBQ  version u32, n_tokens u32, n_channels u32, n_channels real32 scales,
//         then codes packed two per byte, low nibble first, row-major.
//
// Readers throw std::invalid_argument on malformed input.

void write_tokens(std::ostream& out, const TokenMatrix& x);
TokenMatrix read_tokens(std::istream& in);

/// dst_set is not stored; the reader rebuilds it from the pair dst indices.
void write_pairs(std::ostream& out, const TokenPairSet& pairs);
TokenPairSet read_pairs(std::istream& in);

void write_quantized(std::ostream& out, const QuantizedActivation& q);
QuantizedActivation read_quantized(std::istream& in);

void save_tokens(const std::filesystem::path& path, const TokenMatrix& x);
TokenMatrix load_tokens(const std::filesystem::path& path);
void save_pairs(const std::filesystem::path& path, const TokenPairSet& pairs);
TokenPairSet load_pairs(const std::filesystem::path& path);
void save_quantized(const std::filesystem::path& path, const QuantizedActivation& q);
QuantizedActivation load_quantized(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& bytes);

}  // namespace orbis::io
