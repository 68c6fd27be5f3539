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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orbis/hwsim/config.hpp"
#include "orbis/matching.hpp"
#include "orbis/quantization.hpp"

namespace orbis::hwsim {

// Cycle-stepped models of the individual engines. They advance one clock at
// a time over explicit registers and queues, independently of the closed
// forms in engines.hpp, and also compute the functional result.

struct SystolicRun {
  Cycles cycles = 0;
  Eigen::MatrixXd product;
};

/// Output-stationary array: A rows enter from the left and B columns from the
/// top, each skewed by one cycle per row/column; partial tiles are
/// zero-padded to the full array.
SystolicRun simulate_systolic_gemm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const HardwareConfig& cfg);
Cycles simulate_systolic_gemm(std::int64_t m, std::int64_t n, std::int64_t k, const HardwareConfig& cfg);

struct DauRun {
  Cycles cycles = 0;
  std::vector<TokenPair> assignment;  // per src, ascending
};

/// DAU + min tree: (src, dst, chunk) work items enter a dau_pipeline_depth
/// stage pipeline one per cycle; retiring items accumulate scaled code
/// differences and the min tree keeps the nearest dst per src.
DauRun simulate_dau(const QuantizedActivation& q, std::span<const Index> dst_set, const HardwareConfig& cfg);
Cycles simulate_dau(std::int64_t n_dst, std::int64_t n_src, std::int64_t n_channels, const HardwareConfig& cfg);

/// Comparator array of sorter_width / 2 units executing the bitonic
/// network stage by stage, with a barrier between stages.
Cycles simulate_bitonic(std::int64_t n, const HardwareConfig& cfg);

struct QuantRun {
  Cycles cycles = 0;
  QuantizedActivation result;
};

/// Max-abs sweep, per-channel divides on vpu_lanes non-pipelined dividers,
/// then a scale-and-round sweep.
QuantRun simulate_quant_engine(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                                    Eigen::RowMajor>>& x,
                               const HardwareConfig& cfg);
Cycles simulate_quant_engine(std::int64_t n_tokens, std::int64_t n_channels, const HardwareConfig& cfg);

}  // namespace orbis::hwsim
