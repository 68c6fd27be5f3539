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

#include "orbis/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace orbis {

namespace {

void check_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("reduction ratio must lie in [0, 1)");
  }
}

std::vector<Index> shuffled_indices(Index n, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

DstSrcSplit split_from_shuffle(std::vector<Index> order, Index n_dst) {
  DstSrcSplit split;
  split.dst.assign(order.begin(), order.begin() + n_dst);
  split.src.assign(order.begin() + n_dst, order.end());
  std::sort(split.dst.begin(), split.dst.end());
  std::sort(split.src.begin(), split.src.end());
  return split;
}

// Orders by ascending key, then ascending src.
template <typename Key>
std::vector<TokenPair> keep_best(std::vector<TokenPair> candidates, Index k, Key key) {
  std::sort(candidates.begin(), candidates.end(), [&](const TokenPair& a, const TokenPair& b) {
    const double ka = key(a);
    const double kb = key(b);
    if (ka != kb) return ka < kb;
    return a.src < b.src;
  });
  if (static_cast<std::size_t>(k) < candidates.size()) {
    candidates.resize(static_cast<std::size_t>(k));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const TokenPair& a, const TokenPair& b) { return a.src < b.src; });
  return candidates;
}

TokenPairSet make_pair_set(std::vector<TokenPair> kept, Index n_tokens, std::span<const Index> dst_set) {
  TokenPairSet out;
  out.n_tokens = n_tokens;
  out.pairs = std::move(kept);
  out.dst_set.assign(dst_set.begin(), dst_set.end());
  std::sort(out.dst_set.begin(), out.dst_set.end());
  out.reduced_count = static_cast<Index>(out.pairs.size());
  out.realized_ratio = n_tokens > 0 ? static_cast<double>(out.reduced_count) / n_tokens : 0.0;
  return out;
}

}  // namespace

void TokenPairSet::validate() const {
  if (n_tokens < 1) {
    throw std::invalid_argument("pair set: n_tokens must be positive");
  }
  if (reduced_count != static_cast<Index>(pairs.size())) {
    throw std::invalid_argument("pair set: reduced_count does not match pair count");
  }
  std::vector<char> is_dst(static_cast<std::size_t>(n_tokens), 0);
  for (Index d : dst_set) {
    if (d < 0 || d >= n_tokens) throw std::invalid_argument("pair set: dst index out of range");
    if (is_dst[d]) throw std::invalid_argument("pair set: duplicate dst index");
    is_dst[d] = 1;
  }
  std::vector<char> seen_src(static_cast<std::size_t>(n_tokens), 0);
  for (const TokenPair& p : pairs) {
    if (p.src < 0 || p.src >= n_tokens || p.dst < 0 || p.dst >= n_tokens) {
      throw std::invalid_argument("pair set: index out of range");
    }
    if (seen_src[p.src]) throw std::invalid_argument("pair set: src index repeats");
    seen_src[p.src] = 1;
    if (is_dst[p.src]) throw std::invalid_argument("pair set: src index is also a dst");
    if (!is_dst[p.dst]) throw std::invalid_argument("pair set: pair dst not in dst set");
    if (!(p.loss >= 0.0)) throw std::invalid_argument("pair set: negative or NaN loss");
  }
}

double TokenPairSet::mean_loss() const {
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const TokenPair& p : pairs) acc += p.loss;
  return acc / static_cast<double>(pairs.size());
}

DatmConfig DatmConfig::for_tokens(Index n_tokens, double reduction_ratio, std::uint64_t seed) {
  DatmConfig cfg;
  cfg.k_dst = std::max<Index>(1, (n_tokens + 3) / 4);
  cfg.reduction_ratio = reduction_ratio;
  cfg.seed = seed;
  return cfg;
}

Index pairs_for_ratio(double reduction_ratio, Index n_tokens) {
  check_ratio(reduction_ratio);
  return static_cast<Index>(std::floor(reduction_ratio * static_cast<double>(n_tokens)));
}

TokenPairSet bsm_match(const TokenMatrix& x, double reduction_ratio, std::uint64_t seed,
                       double dst_fraction) {
  validate_tokens(x);
  check_ratio(reduction_ratio);
  const Index n = x.rows();
  if (n < 2) {
    throw std::invalid_argument("bsm_match: needs at least two tokens");
  }
  if (!(dst_fraction > 0.0 && dst_fraction < 1.0)) {
    throw std::invalid_argument("bsm_match: dst_fraction must lie in (0, 1)");
  }
  const Index n_dst = std::clamp<Index>(
      static_cast<Index>(std::floor(dst_fraction * static_cast<double>(n))), 1, n - 1);
  const DstSrcSplit split = split_from_shuffle(shuffled_indices(n, seed), n_dst);

  Eigen::VectorXd inv_norm(n);
  for (Index i = 0; i < n; ++i) {
    const double norm = x.row(i).norm();
    inv_norm(i) = norm > 0.0 ? 1.0 / norm : 0.0;
  }

  std::vector<TokenPair> candidates;
  std::vector<double> similarity(static_cast<std::size_t>(n), 0.0);
  candidates.reserve(split.src.size());
  for (Index s : split.src) {
    Index best = split.dst.front();
    double best_sim = -std::numeric_limits<double>::infinity();
    for (Index d : split.dst) {
      const double sim = x.row(s).dot(x.row(d)) * inv_norm(s) * inv_norm(d);
      if (sim > best_sim) {
        best_sim = sim;
        best = d;
      }
    }
    similarity[s] = best_sim;
    candidates.push_back({s, best, row_sqdist(x, s, best)});
  }

  const Index k = pairs_for_ratio(reduction_ratio, n);
  auto kept = keep_best(std::move(candidates), k,
                        [&](const TokenPair& p) { return -similarity[p.src]; });
  return make_pair_set(std::move(kept), n, split.dst);
}

DstSrcSplit datm_init(const TokenMatrix& x, const DatmConfig& cfg) {
  const Index n = x.rows();
  if (cfg.k_dst < 1 || cfg.k_dst >= n) {
    throw std::invalid_argument("datm_init: k_dst must lie in [1, n_tokens)");
  }
  return split_from_shuffle(shuffled_indices(n, cfg.seed), cfg.k_dst);
}

std::vector<TokenPair> datm_pairing(const TokenMatrix& x, std::span<const Index> dst_set) {
  if (dst_set.empty()) {
    throw std::invalid_argument("datm_pairing: dst set is empty");
  }
  std::vector<char> is_dst(static_cast<std::size_t>(x.rows()), 0);
  for (Index d : dst_set) is_dst[d] = 1;

  std::vector<TokenPair> assignment;
  assignment.reserve(static_cast<std::size_t>(x.rows()) - dst_set.size());
  for (Index s = 0; s < x.rows(); ++s) {
    if (is_dst[s]) continue;
    TokenPair best{s, -1, std::numeric_limits<double>::infinity()};
    for (Index d : dst_set) {
      const double dist = row_sqdist(x, s, d);
      if (dist < best.loss || (dist == best.loss && d < best.dst)) {
        best.dst = d;
        best.loss = dist;
      }
    }
    assignment.push_back(best);
  }
  return assignment;
}

double datm_mean_loss(std::span<const TokenPair> assignment) {
  if (assignment.empty()) {
    throw std::invalid_argument("datm_mean_loss: no src tokens");
  }
  double acc = 0.0;
  for (const TokenPair& p : assignment) acc += p.loss;
  return acc / static_cast<double>(assignment.size());
}

std::vector<Index> datm_update(const TokenMatrix& x, std::span<const TokenPair> assignment,
                               std::span<const Index> dst_set) {
  const Index n_dst = static_cast<Index>(dst_set.size());
  std::vector<Index> slot(static_cast<std::size_t>(x.rows()), -1);
  for (Index g = 0; g < n_dst; ++g) slot[dst_set[g]] = g;

  // Group members in ascending token order, the dst itself included.
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(n_dst));
  for (Index g = 0; g < n_dst; ++g) groups[g].push_back(dst_set[g]);
  for (const TokenPair& p : assignment) {
    const Index g = slot[p.dst];
    if (g < 0) throw std::invalid_argument("datm_update: assignment points outside dst set");
    groups[g].push_back(p.src);
  }

  std::vector<Index> updated;
  updated.reserve(static_cast<std::size_t>(n_dst));
  Eigen::RowVectorXd mean(x.cols());
  for (auto& members : groups) {
    std::sort(members.begin(), members.end());
    mean.setZero();
    for (Index m : members) mean += x.row(m);
    mean /= static_cast<double>(members.size());

    Index best = members.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index m : members) {
      double acc = 0.0;
      for (Index c = 0; c < x.cols(); ++c) {
        const double d = x(m, c) - mean(c);
        acc += d * d;
      }
      if (acc < best_dist) {
        best_dist = acc;
        best = m;
      }
    }
    updated.push_back(best);
  }
  std::sort(updated.begin(), updated.end());
  return updated;
}

DatmOutcome datm_match_detailed(const TokenMatrix& x, const DatmConfig& cfg) {
  validate_tokens(x);
  check_ratio(cfg.reduction_ratio);
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("datm: max_iterations must be at least 1");
  }
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("datm: epsilon must be positive");
  }

  DatmOutcome out;
  std::vector<Index> dst = datm_init(x, cfg).dst;
  std::vector<TokenPair> assignment;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    assignment = datm_pairing(x, dst);
    const double loss = datm_mean_loss(assignment);
    out.loss_history.push_back(loss);
    out.iterations = it;
    // An infinite threshold accepts the first pass, including its undefined delta.
    if (std::isinf(cfg.epsilon) || std::abs(loss - previous) < cfg.epsilon) {
      out.converged = true;
      break;
    }
    if (it == cfg.max_iterations) break;
    dst = datm_update(x, assignment, dst);
    previous = loss;
  }
  out.pairs = top_k_select(assignment, cfg.reduction_ratio, x.rows(), dst);
  return out;
}

TokenPairSet top_k_select(std::span<const TokenPair> candidates, double reduction_ratio,
                          Index n_tokens, std::span<const Index> dst_set) {
  const Index k = pairs_for_ratio(reduction_ratio, n_tokens);
  auto kept = keep_best(std::vector<TokenPair>(candidates.begin(), candidates.end()), k,
                        [](const TokenPair& p) { return p.loss; });
  return make_pair_set(std::move(kept), n_tokens, dst_set);
}

double matching_quality(const TokenPairSet& pairs, const TokenMatrix& gt_output) {
  if (pairs.n_tokens != gt_output.rows()) {
    throw std::invalid_argument("matching_quality: pair set and output disagree on token count");
  }
  if (pairs.pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const TokenPair& p : pairs.pairs) acc += row_sqdist(gt_output, p.src, p.dst);
  return acc / static_cast<double>(pairs.pairs.size());
}

}  // namespace orbis
