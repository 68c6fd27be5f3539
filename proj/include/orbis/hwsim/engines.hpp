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

#include "orbis/hwsim/config.hpp"

namespace orbis::hwsim {

/// Ceiling division for non-negative operands.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

/// Systolic-array GEMM (m x k) * (k x n). The output is tiled into
/// ceil(m / rows) * ceil(n / cols) array-sized tiles; each tile streams k
/// operands through the skewed array and costs k + rows + cols - 2 cycles
/// (fill, stream, drain). Tiles run back to back.
Cycles sa_gemm_cycles(std::int64_t m, std::int64_t n, std::int64_t k, const HardwareConfig& cfg);

/// Distance accumulation unit: one (dst, src, channel-chunk) partial per
/// cycle with dau_lanes channels per chunk, plus pipeline fill:
///   depth + ceil(channels / lanes) * n_dst * n_src - 1
/// The min tree reduces on the fly and adds no cycles. No work -> 0.
Cycles dau_pipeline_cycles(std::int64_t n_dst, std::int64_t n_src, std::int64_t n_channels,
                           const HardwareConfig& cfg);

struct BitonicCost {
  std::int64_t padded = 0;       // 2^p
  std::int64_t stages = 0;       // p (p + 1) / 2
  std::int64_t comparators = 0;  // 2^(p-1) * stages
  Cycles cycles = 0;             // stages * ceil(2^(p-1) / (sorter_width / 2))
};

/// Bitonic network over n keys padded to the next power of two.
BitonicCost bitonic_topk_cycles(std::int64_t n, const HardwareConfig& cfg);

/// Quantization engine on the DXE vector unit: a max-abs pass and a
/// scale-and-round pass over every element, plus one divider round per
/// lane group of channels:
///   2 * ceil(tokens * channels / lanes) + ceil(channels / lanes) * div_latency
Cycles qe_cycles(std::int64_t n_tokens, std::int64_t n_channels, const HardwareConfig& cfg);

/// `passes` sweeps over `elements` values on the DXE vector unit.
Cycles vpu_pass_cycles(std::int64_t elements, std::int64_t passes, const HardwareConfig& cfg);

/// Shard-local DATM sizes for one instance.
struct DatmShape {
  std::int64_t tokens = 0;
  std::int64_t n_dst = 0;
  std::int64_t n_src = 0;
  std::int64_t channels = 0;
};

DatmShape datm_shape(std::int64_t shard_tokens, std::int64_t channels, const HardwareConfig& cfg);

/// Dst update and convergence check on the DATM vector unit for one
/// iteration: group sums and distance-to-mean sweep every element once each,
/// the convergence check sweeps the per-src losses.
Cycles datm_update_cycles(const DatmShape& s, const HardwareConfig& cfg);

/// DATM engine total for one layer: datm_iterations * (DAU pairing + update)
/// followed by the bitonic top-k over the src losses.
Cycles datm_engine_cycles(const DatmShape& s, const HardwareConfig& cfg);

/// Full-precision DATM on the DXE vector unit (no DATM engine).
Cycles datm_vpu_cycles(const DatmShape& s, const HardwareConfig& cfg);

/// Bipartite soft matching on the DXE vector unit: row normalisation, one
/// similarity pass over every (dst, src) pair, and a bitonic sort of the
/// src scores executed as vector compare-exchanges.
Cycles bsm_vpu_cycles(std::int64_t shard_tokens, std::int64_t channels, const HardwareConfig& cfg);

}  // namespace orbis::hwsim
