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

#include "orbis/hwsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orbis/matching.hpp"

namespace orbis::hwsim {

namespace {

HwWorkload make(std::string name, Index visual, Index text, Index channels, Index heads, Index layers, Index steps) {
  HwWorkload wl;
  wl.model.name = std::move(name);
  wl.model.n_tokens = visual + text;
  wl.model.n_text_tokens = text;
  wl.model.n_channels = channels;
  wl.model.n_heads = heads;
  wl.model.n_layers = layers;
  wl.model.n_timesteps = steps;
  return wl;
}

Op gemm(std::string name, std::int64_t m, std::int64_t n, std::int64_t k, std::int64_t repeat,
        std::int64_t dram_elements, const HardwareConfig& cfg) {
  Op op;
  op.name = std::move(name);
  op.unit = Unit::SystolicArray;
  op.compute_cycles = repeat * sa_gemm_cycles(m, n, k, cfg);
  op.macs = op.compute_cycles * cfg.sa_rows * cfg.sa_cols;
  op.dram_bytes = dram_elements * cfg.bytes_per_activation;
  op.sram_bytes = repeat * (m * k + k * n + m * n) * cfg.bytes_per_activation;
  return op;
}

Op vector(std::string name, std::int64_t elements, std::int64_t passes, const HardwareConfig& cfg) {
  Op op;
  op.name = std::move(name);
  op.unit = Unit::Vector;
  op.compute_cycles = vpu_pass_cycles(elements, passes, cfg);
  op.vector_ops = op.compute_cycles * cfg.vpu_lanes;
  op.sram_bytes = 2 * elements * passes * cfg.bytes_per_activation;
  return op;
}

}  // namespace

void HwWorkload::validate() const {
  model.validate();
  if (ffn_mult < 1) throw std::invalid_argument("workload: ffn_mult must be positive");
}

HwWorkload hw_preset(std::string_view name) {
  if (name == "toy") {
    HwWorkload wl;
    wl.model = WorkloadDesc::toy();
    return wl;
  }
  // 13 latent frames of 30 x 45 patches, 226 text tokens.
  if (name == "cogvideox-like") return make("cogvideox-like", 17550, 226, 3072, 48, 42, 50);
  // 33 latent frames of 34 x 60 patches, 256 text tokens.
  if (name == "hunyuan-like") return make("hunyuan-like", 67320, 256, 3072, 24, 60, 50);
  throw std::invalid_argument("unknown workload preset '" + std::string(name) + "'");
}

std::vector<std::string> hw_preset_names() { return {"toy", "cogvideox-like", "hunyuan-like"}; }

ShardShape shard_shape(const HwWorkload& wl, const HardwareConfig& cfg) {
  return {ceil_div(wl.model.n_tokens, cfg.n_instances), ceil_div(wl.model.visual_tokens(), cfg.n_instances)};
}

std::vector<Op> layer_ops(const HwWorkload& wl, const HardwareConfig& cfg, double ratio) {
  wl.validate();
  const ShardShape sh = shard_shape(wl, cfg);
  const std::int64_t S = sh.tokens;
  const std::int64_t N = wl.model.n_tokens;
  const std::int64_t D = wl.model.n_channels;
  const std::int64_t H = wl.model.n_heads;
  const std::int64_t dh = wl.model.head_dim();
  const std::int64_t F = wl.ffn_mult * D;
  const std::int64_t local_removed = pairs_for_ratio(ratio, sh.visual);
  const std::int64_t global_removed = pairs_for_ratio(ratio, wl.model.visual_tokens());
  const std::int64_t Sr = S - local_removed;
  const std::int64_t Nr = N - global_removed;
  const bool reduced = local_removed > 0;

  std::vector<Op> ops;
  ops.push_back(vector("norm1", S * D, 3, cfg));
  ops.push_back(gemm("qkv", S, 3 * D, D, 1, 3 * D * D + S * D + 3 * S * D, cfg));
  if (reduced) {
    Op op = vector("reduce", Sr * 3 * D, 1, cfg);
    op.dram_bytes = local_removed * 8;  // two 32-bit indices per pair
    ops.push_back(op);
  }
  // Fused attention: scores stay on chip, every instance reads all K and V.
  ops.push_back(gemm("scores", Sr, Nr, dh, H, H * (Sr * dh + Nr * dh), cfg));
  ops.push_back(vector("softmax", Sr * Nr * H, cfg.softmax_passes, cfg));
  ops.push_back(gemm("attn_v", Sr, dh, Nr, H, H * (Nr * dh + Sr * dh), cfg));
  if (reduced) {
    ops.push_back(vector("restore", S * D, 1, cfg));
  }
  ops.back().sdpa_output = true;
  ops.push_back(gemm("out_proj", S, D, D, 1, D * D + 2 * S * D, cfg));
  ops.push_back(vector("residual_norm2", S * D, 4, cfg));
  ops.push_back(gemm("ffn_up", S, F, D, 1, F * D + S * D + S * F, cfg));
  ops.push_back(vector("gelu", S * F, 2, cfg));
  ops.push_back(gemm("ffn_down", S, D, F, 1, F * D + S * F + S * D, cfg));
  ops.push_back(vector("residual", S * D, 1, cfg));

  for (Op& op : ops) {
    const auto transfer = static_cast<Cycles>(std::ceil(static_cast<double>(op.dram_bytes) / cfg.bytes_per_cycle()));
    op.cycles = std::max(op.compute_cycles, transfer);
  }
  return ops;
}

std::string to_string(MatchingMode m) {
  switch (m) {
    case MatchingMode::None: return "none";
    case MatchingMode::BsmOnVpu: return "bsm-vpu";
    case MatchingMode::DatmOnVpu: return "datm-vpu";
    case MatchingMode::DatmEngine: return "datm-engine";
  }
  return "?";
}

std::vector<std::int64_t> match_groups(const HwWorkload& wl, const HardwareConfig& cfg) {
  std::vector<std::int64_t> groups;
  for (std::int64_t left = wl.model.visual_tokens(); left > 0; left -= cfg.match_group_tokens) {
    groups.push_back(std::min(left, cfg.match_group_tokens));
  }
  return groups;
}

MatchingTask matching_task(std::int64_t group_tokens, std::int64_t channels, double ratio, MatchingMode mode,
                           const HardwareConfig& cfg) {
  MatchingTask t;
  t.group_tokens = group_tokens;
  if (mode == MatchingMode::None || group_tokens < 2) return t;
  const std::int64_t bytes = cfg.bytes_per_activation;
  const std::int64_t pair_bytes = pairs_for_ratio(ratio, group_tokens) * 8;
  // The group is gathered from the instances that produced it.
  t.dram_bytes = group_tokens * channels * bytes + pair_bytes;
  const DatmShape s = datm_shape(group_tokens, channels, cfg);
  switch (mode) {
    case MatchingMode::BsmOnVpu:
      t.vpu_cycles = bsm_vpu_cycles(group_tokens, channels, cfg);
      break;
    case MatchingMode::DatmOnVpu:
      t.vpu_cycles = datm_vpu_cycles(s, cfg);
      // src rows stream from DRAM on every pass
      t.dram_bytes += cfg.datm_iterations * s.n_src * channels * bytes;
      break;
    case MatchingMode::DatmEngine:
      t.qe_cycles = qe_cycles(group_tokens, channels, cfg);
      t.dau_cycles = cfg.datm_iterations * dau_pipeline_cycles(s.n_dst, s.n_src, s.channels, cfg);
      t.update_cycles = cfg.datm_iterations * datm_update_cycles(s, cfg);
      t.sort_cycles = s.n_src >= 2 ? bitonic_topk_cycles(s.n_src, cfg).cycles : 0;
      // 4-bit src codes stream from DRAM on every pass
      t.dram_bytes += cfg.datm_iterations * ceil_div(s.n_src * channels, 2);
      break;
    case MatchingMode::None:
      break;
  }
  return t;
}

std::vector<std::int64_t> busiest_instance_groups(const HwWorkload& wl, const HardwareConfig& cfg) {
  const std::vector<std::int64_t> groups = match_groups(wl, cfg);
  std::vector<std::int64_t> mine;
  for (std::size_t g = 0; g < groups.size(); g += static_cast<std::size_t>(cfg.n_instances)) {
    mine.push_back(groups[g]);
  }
  return mine;
}

}  // namespace orbis::hwsim
