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
#include <map>
#include <string>

namespace orbis::hwsim {

using Cycles = std::int64_t;

/// Per-instance hardware parameters. Unless noted, values are modelling
/// defaults, not measured silicon figures.
struct HardwareConfig {
  // Diffusion execution engine. 312 TFLOPS FP16 / 38 instances / 1 GHz /
  // 2 flops per MAC ~= 4105 MACs, hence a 64 x 64 array.
  std::int64_t sa_rows = 64;
  std::int64_t sa_cols = 64;
  std::int64_t vpu_lanes = 128;
  std::int64_t softmax_passes = 3;       // max, exp-sum, normalize
  std::int64_t vpu_ops_per_distance = 3;  // sub, mul, add per channel on the VPU

  // Quantization engine (runs on the DXE vector unit).
  std::int64_t qe_divide_latency = 8;

  // DATM engine.
  // One full-width (3072-channel) distance per cycle for the large presets.
  std::int64_t dau_lanes = 3072;
  std::int64_t dau_pipeline_depth = 8;
  std::int64_t min_tree_width = 3072;
  std::int64_t datm_vec_lanes = 256;
  std::int64_t sorter_width = 64;  // elements per comparator-array pass; power of two
  // Staging buffer only: dst codes live in the shared global memory and src
  // codes stream from DRAM on every pass.
  std::int64_t datm_buffer_kb = 32;

  // Matching workload. Visual tokens are matched in fixed-size groups that
  // are spread round-robin over the instances; latency hiding is judged at
  // the iteration cap.
  std::int64_t match_group_tokens = 2048;
  std::int64_t datm_iterations = 8;
  double datm_k_fraction = 0.25;
  double bsm_dst_fraction = 0.5;

  // System.
  double clock_ghz = 1.0;
  std::int64_t n_instances = 38;
  double dram_bw_gbps_per_instance = 1935.0 / 38.0;  // A100 80GB PCIe bandwidth share
  double dram_pj_per_bit = 3.9;
  double global_mem_mb = 40.0 / 38.0;
  std::int64_t bytes_per_activation = 2;  // FP16

  // A100 throughput proxy.
  double a100_tensor_tflops = 312.0;
  double a100_vector_tflops = 78.0;
  double a100_bandwidth_gbps = 1935.0;
  double a100_efficiency = 0.25;  // sustained fraction of peak, calibrated
  double a100_power_w = 250.0;

  /// pJ per unit-cycle of each op class (per MAC, per lane op, per comparator).
  std::map<std::string, double> energy_table = default_energy_table();
  /// mm^2 per unit (PE, lane, tree node, comparator, KB or MB of SRAM, block).
  std::map<std::string, double> area_table = default_area_table();

  static std::map<std::string, double> default_energy_table();
  static std::map<std::string, double> default_area_table();

  double bytes_per_cycle() const { return dram_bw_gbps_per_instance / clock_ghz; }

  /// Throws std::invalid_argument on non-positive fields or a sorter width
  /// that is not a power of two.
  void validate() const;

  /// Applies one `key = value` setting. Table entries use `energy.<name>` and
  /// `area.<name>`. Unknown keys throw std::invalid_argument.
  void set(const std::string& key, const std::string& value);

  /// Every settable key with its current value, in stable order.
  std::map<std::string, std::string> to_key_values() const;
};

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_value_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(std::istream& in);

}  // namespace orbis::hwsim
