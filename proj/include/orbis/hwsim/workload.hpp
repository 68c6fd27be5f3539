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

#include <string>
#include <string_view>
#include <vector>

#include "orbis/hwsim/config.hpp"
#include "orbis/hwsim/engines.hpp"
#include "orbis/trajectory.hpp"

namespace orbis::hwsim {

/// Transformer shape the simulator runs: one attention block plus an FFN
/// per layer, visual and text tokens attending jointly.
struct HwWorkload {
  WorkloadDesc model;
  std::int64_t ffn_mult = 4;

  void validate() const;
};

/// "toy", "cogvideox-like" or "hunyuan-like". Unknown names throw
/// std::invalid_argument.
HwWorkload hw_preset(std::string_view name);
std::vector<std::string> hw_preset_names();

/// Token counts held by one instance under data parallelism over tokens.
struct ShardShape {
  std::int64_t tokens = 0;
  std::int64_t visual = 0;
};

ShardShape shard_shape(const HwWorkload& wl, const HardwareConfig& cfg);

enum class Unit { SystolicArray, Vector };

/// One DXE operation of a layer as seen by a single instance.
struct Op {
  std::string name;
  Unit unit = Unit::Vector;
  Cycles compute_cycles = 0;
  std::int64_t dram_bytes = 0;
  Cycles cycles = 0;  // max(compute, DRAM transfer)
  std::int64_t macs = 0;        // systolic array ops: MACs issued, padding included
  std::int64_t vector_ops = 0;  // vector ops: lane operations issued
  std::int64_t sram_bytes = 0;
  bool sdpa_output = false;  // matching may start once this op ends
};

/// Per-layer DXE op list. `ratio` is the reduction applied to SDPA; with
/// fewer than one token removed no reduce/restore ops are emitted.
std::vector<Op> layer_ops(const HwWorkload& wl, const HardwareConfig& cfg, double ratio);

/// Matching work one instance performs for one layer of an FC step.
struct MatchingTask {
  std::int64_t group_tokens = 0;
  Cycles qe_cycles = 0;
  Cycles dau_cycles = 0;     // DAU + min tree, all iterations
  Cycles update_cycles = 0;  // DATM vector unit, all iterations
  Cycles sort_cycles = 0;    // comparator array
  Cycles vpu_cycles = 0;     // matching executed on the DXE vector unit
  std::int64_t dram_bytes = 0;

  Cycles engine_cycles() const { return dau_cycles + update_cycles + sort_cycles; }
};

enum class MatchingMode {
  None,
  BsmOnVpu,
  DatmOnVpu,
  DatmEngine,  // QE on the vector unit, then the DATM engine
};

std::string to_string(MatchingMode m);

/// Sizes of the matching groups one layer produces (the last one may be short).
std::vector<std::int64_t> match_groups(const HwWorkload& wl, const HardwareConfig& cfg);

/// Work of a single group under the given mode.
MatchingTask matching_task(std::int64_t group_tokens, std::int64_t channels, double ratio, MatchingMode mode,
                           const HardwareConfig& cfg);

/// Groups handled by the busiest instance: groups are dealt round-robin,
/// largest first, so instance 0 carries ceil(groups / instances) of them.
std::vector<std::int64_t> busiest_instance_groups(const HwWorkload& wl, const HardwareConfig& cfg);

}  // namespace orbis::hwsim
