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
#include <span>
#include <vector>

#include "orbis/tensor.hpp"

namespace orbis {

struct TokenPair {
  Index src = 0;
  Index dst = 0;
  double loss = 0.0;

  friend bool operator==(const TokenPair&, const TokenPair&) = default;
};

/// Retained src -> dst index pairs. Pairs are kept sorted by src index.
/// A src token that is not in `pairs` stays in the sequence unreduced.
struct TokenPairSet {
  Index n_tokens = 0;
  std::vector<TokenPair> pairs;
  std::vector<Index> dst_set;  // ascending
  Index reduced_count = 0;
  /// reduced_count / n_tokens; differs from the requested ratio only when
  /// fewer candidates existed than the ratio asked for.
  double realized_ratio = 0.0;

  /// Throws std::invalid_argument if an index is out of range, a src repeats,
  /// a src is also a dst, or a pair points at a dst outside dst_set.
  void validate() const;

  double mean_loss() const;

  friend bool operator==(const TokenPairSet&, const TokenPairSet&) = default;
};

struct DatmConfig {
  Index k_dst = 1;
  double reduction_ratio = 0.5;
  double epsilon = 1e-6;
  int max_iterations = 16;
  std::uint64_t seed = 0;

  /// k_dst = ceil(n_tokens / 4), everything else at its default.
  static DatmConfig for_tokens(Index n_tokens, double reduction_ratio, std::uint64_t seed);
};

struct DstSrcSplit {
  std::vector<Index> dst;  // ascending
  std::vector<Index> src;  // ascending
};

/// Number of pairs a ratio asks for: floor(ratio * n_tokens).
Index pairs_for_ratio(double reduction_ratio, Index n_tokens);

// --- Bipartite soft matching baseline -------------------------------------

/// Random dst/src split (dst_fraction of the tokens become dst), each src
/// paired to its most cosine-similar dst, and the k most similar pairs kept.
/// The recorded pair loss is squared L2 so it is comparable with DATM.
TokenPairSet bsm_match(const TokenMatrix& x, double reduction_ratio, std::uint64_t seed,
                       double dst_fraction = 0.5);

// --- Distribution-aware token matching -----------------------------------

DstSrcSplit datm_init(const TokenMatrix& x, const DatmConfig& cfg);

/// One pair per src token (ascending src), each pointing at the nearest dst
/// by squared L2. Ties go to the smaller dst index.
std::vector<TokenPair> datm_pairing(const TokenMatrix& x, std::span<const Index> dst_set);

double datm_mean_loss(std::span<const TokenPair> assignment);

/// Moves every dst to the member of its group (the dst plus its assigned src
/// tokens) closest to the group mean. Output stays ascending.
std::vector<Index> datm_update(const TokenMatrix& x, std::span<const TokenPair> assignment,
                               std::span<const Index> dst_set);

struct DatmOutcome {
  TokenPairSet pairs;
  int iterations = 0;  // pairing passes executed
  bool converged = false;
  std::vector<double> loss_history;  // mean loss after each pairing pass
};

DatmOutcome datm_match_detailed(const TokenMatrix& x, const DatmConfig& cfg);

inline TokenPairSet datm_match(const TokenMatrix& x, const DatmConfig& cfg) {
  return datm_match_detailed(x, cfg).pairs;
}

/// Keeps the floor(ratio * n_tokens) candidates with the smallest loss
/// (ties by smaller src index). If fewer candidates exist, all are kept.
TokenPairSet top_k_select(std::span<const TokenPair> candidates, double reduction_ratio,
                          Index n_tokens, std::span<const Index> dst_set);

/// Mean squared L2 between the ground-truth output rows of every retained
/// (src, dst) pair. An empty pair set scores 0.
double matching_quality(const TokenPairSet& pairs, const TokenMatrix& gt_output);

}  // namespace orbis
