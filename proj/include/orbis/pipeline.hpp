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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "orbis/matching.hpp"
#include "orbis/tensor.hpp"
#include "orbis/trajectory.hpp"

namespace orbis {

enum class StepKind { Full, Reduced };  // FC / RC timesteps

std::string_view to_string(StepKind kind);

struct Schedule {
  std::vector<StepKind> steps;
  int rc_per_fc = 3;

  /// FC followed by rc_per_fc RC steps, repeated to n_timesteps.
  static Schedule standard(Index n_timesteps, int rc_per_fc = 3);
  /// Every step FC (no reduction).
  static Schedule all_full(Index n_timesteps);

  /// First step FC, and no RC step further than rc_per_fc steps from its FC.
  void validate() const;
};

// --- Reduce / compute / restore ---------------------------------------------

/// Drops the rows of retained src tokens, keeping the others in order.
template <typename Derived>
TokenMatrixT<typename Derived::Scalar> reduce(const Eigen::MatrixBase<Derived>& x, const TokenPairSet& pairs) {
  if (pairs.n_tokens != x.rows()) {
    throw std::invalid_argument("reduce: pair set and tokens disagree on length");
  }
  pairs.validate();
  std::vector<char> removed(static_cast<std::size_t>(x.rows()), 0);
  for (const TokenPair& p : pairs.pairs) removed[p.src] = 1;
  TokenMatrixT<typename Derived::Scalar> out(x.rows() - pairs.reduced_count, x.cols());
  Index r = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    if (!removed[i]) out.row(r++) = x.row(i);
  }
  return out;
}

/// Full-length output: kept positions take their reduced row back, every
/// removed src position receives a copy of its dst's row.
template <typename Derived>
TokenMatrixT<typename Derived::Scalar> restore(const Eigen::MatrixBase<Derived>& y_reduced,
                                               const TokenPairSet& pairs) {
  pairs.validate();
  if (y_reduced.rows() != pairs.n_tokens - pairs.reduced_count) {
    throw std::invalid_argument("restore: reduced length does not match pair set");
  }
  std::vector<Index> reduced_row(static_cast<std::size_t>(pairs.n_tokens), -1);
  for (const TokenPair& p : pairs.pairs) reduced_row[p.src] = -2;
  Index r = 0;
  for (Index i = 0; i < pairs.n_tokens; ++i) {
    if (reduced_row[i] == -1) reduced_row[i] = r++;
  }
  TokenMatrixT<typename Derived::Scalar> out(pairs.n_tokens, y_reduced.cols());
  for (Index i = 0; i < pairs.n_tokens; ++i) {
    if (reduced_row[i] >= 0) out.row(i) = y_reduced.row(reduced_row[i]);
  }
  for (const TokenPair& p : pairs.pairs) out.row(p.src) = y_reduced.row(reduced_row[p.dst]);
  return out;
}

/// softmax(Q K^T / sqrt(d_head)) V per head, heads concatenated.
TokenMatrix sdpa(const TokenMatrix& q, const TokenMatrix& k, const TokenMatrix& v, Index n_heads);

/// Fixed per-layer projections of the toy attention block.
struct LayerWeights {
  Eigen::MatrixXd wq, wk, wv;

  static LayerWeights random(Index n_channels, std::uint64_t seed, Index layer);
};

/// Toy attention block over a token stream. With a pair set, Q, K and V are
/// reduced before SDPA and the output restored afterwards.
TokenMatrix attention_block(const TokenMatrix& stream, const LayerWeights& w, Index n_heads,
                            const TokenPairSet* pairs = nullptr);

// --- Pipeline runs ----------------------------------------------------------

enum class MatcherKind { Bsm, Datm, DatmQuantized };
enum class Guidance { Output, Input };

std::string_view to_string(MatcherKind kind);
std::string_view to_string(Guidance guidance);
MatcherKind parse_matcher(std::string_view name);
Guidance parse_guidance(std::string_view name);

struct PipelineOptions {
  MatcherKind matcher = MatcherKind::Datm;
  Guidance guidance = Guidance::Output;
  double reduction_ratio = 0.5;
  std::uint64_t seed = 0;  // matcher and weight seed
  int max_iterations = 16;
  double epsilon = 1e-6;
  double k_dst_fraction = 0.25;  // DATM initial dst count / visual tokens
};

/// Runs the matcher on the visual rows of `x` and lifts the indices back to
/// the full sequence.
TokenPairSet match_tokens(const TokenMatrix& x, Index n_visual, const PipelineOptions& opt,
                          std::uint64_t seed);

struct StepRecord {
  Index timestep = 0;
  Index layer = 0;
  StepKind kind = StepKind::Full;
  double mean_pair_loss = 0.0;    // matcher loss of the pairs in use
  double matching_quality = 0.0;  // those pairs scored on this step's true output
  Index reduced_tokens = 0;       // rows removed before SDPA
  double output_error = 0.0;      // mean squared row error vs full computation
};

struct RunResult {
  PipelineOptions options;
  std::vector<StepRecord> records;
  std::vector<TokenMatrix> final_outputs;  // per layer, after the last step
};

/// FC steps compute the full block and (output guidance) match on its output;
/// RC steps reduce -> SDPA -> restore with the stored same-layer pairs. Under
/// input guidance every RC step matches on its own layer input instead.
/// The layer block attends over each frame's output stream.
RunResult run_pipeline(const Trajectory& traj, const WorkloadDesc& wl, const Schedule& sched,
                       const PipelineOptions& opt);

RunResult run_pipeline(const TrajectoryConfig& tcfg, const WorkloadDesc& wl, const Schedule& sched,
                       const PipelineOptions& opt);

/// "# orbis-csv v1 pipeline" then one row per (timestep, layer).
void write_run_csv(std::ostream& out, const RunResult& result);

inline constexpr std::string_view kPipelineCsvHeader =
    "timestep,layer,step_kind,matcher,guidance,ratio,mean_pair_loss,matching_quality,reduced_tokens,"
    "output_error";

}  // namespace orbis
