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

#include "orbis/hwsim/engines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orbis::hwsim {

namespace {

void require_positive(std::int64_t v, const char* what) {
  if (v < 1) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

Cycles sa_gemm_cycles(std::int64_t m, std::int64_t n, std::int64_t k, const HardwareConfig& cfg) {
  require_positive(m, "gemm m");
  require_positive(n, "gemm n");
  require_positive(k, "gemm k");
  const std::int64_t tiles = ceil_div(n, cfg.sa_cols) * ceil_div(m, cfg.sa_rows);
  return tiles * (k + cfg.sa_rows + cfg.sa_cols - 2);
}

Cycles dau_pipeline_cycles(std::int64_t n_dst, std::int64_t n_src, std::int64_t n_channels,
                           const HardwareConfig& cfg) {
  if (n_dst <= 0 || n_src <= 0 || n_channels <= 0) return 0;
  return cfg.dau_pipeline_depth + ceil_div(n_channels, cfg.dau_lanes) * n_dst * n_src - 1;
}

BitonicCost bitonic_topk_cycles(std::int64_t n, const HardwareConfig& cfg) {
  if (n < 2) throw std::invalid_argument("bitonic network needs at least two keys");
  BitonicCost c;
  std::int64_t p = 0;
  c.padded = 1;
  while (c.padded < n) {
    c.padded <<= 1;
    ++p;
  }
  c.stages = p * (p + 1) / 2;
  const std::int64_t per_stage = c.padded / 2;
  c.comparators = per_stage * c.stages;
  c.cycles = c.stages * ceil_div(per_stage, cfg.sorter_width / 2);
  return c;
}

Cycles qe_cycles(std::int64_t n_tokens, std::int64_t n_channels, const HardwareConfig& cfg) {
  require_positive(n_tokens, "qe tokens");
  require_positive(n_channels, "qe channels");
  return 2 * ceil_div(n_tokens * n_channels, cfg.vpu_lanes) +
         ceil_div(n_channels, cfg.vpu_lanes) * cfg.qe_divide_latency;
}

Cycles vpu_pass_cycles(std::int64_t elements, std::int64_t passes, const HardwareConfig& cfg) {
  if (elements <= 0 || passes <= 0) return 0;
  return passes * ceil_div(elements, cfg.vpu_lanes);
}

DatmShape datm_shape(std::int64_t shard_tokens, std::int64_t channels, const HardwareConfig& cfg) {
  DatmShape s;
  s.tokens = shard_tokens;
  s.channels = channels;
  if (shard_tokens < 2) return s;
  s.n_dst = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(cfg.datm_k_fraction * static_cast<double>(shard_tokens))), 1,
      shard_tokens - 1);
  s.n_src = shard_tokens - s.n_dst;
  return s;
}

Cycles datm_update_cycles(const DatmShape& s, const HardwareConfig& cfg) {
  if (s.n_src <= 0) return 0;
  return 2 * ceil_div(s.tokens * s.channels, cfg.datm_vec_lanes) + ceil_div(s.n_src, cfg.datm_vec_lanes);
}

Cycles datm_engine_cycles(const DatmShape& s, const HardwareConfig& cfg) {
  if (s.n_src <= 0) return 0;
  const Cycles per_iteration =
      dau_pipeline_cycles(s.n_dst, s.n_src, s.channels, cfg) + datm_update_cycles(s, cfg);
  const Cycles topk = s.n_src >= 2 ? bitonic_topk_cycles(s.n_src, cfg).cycles : 0;
  return cfg.datm_iterations * per_iteration + topk;
}

Cycles datm_vpu_cycles(const DatmShape& s, const HardwareConfig& cfg) {
  if (s.n_src <= 0) return 0;
  const Cycles pairing =
      ceil_div(s.n_dst * s.n_src * s.channels * cfg.vpu_ops_per_distance, cfg.vpu_lanes);
  const Cycles update = 2 * ceil_div(s.tokens * s.channels, cfg.vpu_lanes) + ceil_div(s.n_src, cfg.vpu_lanes);
  Cycles topk = 0;
  if (s.n_src >= 2) {
    // Two vector ops (compare, select) per comparator.
    topk = ceil_div(2 * bitonic_topk_cycles(s.n_src, cfg).comparators, cfg.vpu_lanes);
  }
  return cfg.datm_iterations * (pairing + update) + topk;
}

Cycles bsm_vpu_cycles(std::int64_t shard_tokens, std::int64_t channels, const HardwareConfig& cfg) {
  if (shard_tokens < 2) return 0;
  const std::int64_t n_dst = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(cfg.bsm_dst_fraction * static_cast<double>(shard_tokens))), 1,
      shard_tokens - 1);
  const std::int64_t n_src = shard_tokens - n_dst;
  // dot product: mul + add per channel
  const Cycles similarity = ceil_div(n_dst * n_src * channels * 2, cfg.vpu_lanes);
  const Cycles normalise = 3 * ceil_div(shard_tokens * channels, cfg.vpu_lanes);
  const Cycles sort = n_src >= 2 ? ceil_div(2 * bitonic_topk_cycles(n_src, cfg).comparators, cfg.vpu_lanes) : 0;
  return similarity + normalise + sort;
}

}  // namespace orbis::hwsim
