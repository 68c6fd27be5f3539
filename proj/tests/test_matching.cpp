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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "orbis/matching.hpp"
#include "orbis/trajectory.hpp"

namespace orbis {
namespace {

TokenMatrix random_tokens(Index n, Index d, std::uint64_t seed, int levels = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> coarse(-levels, levels);
  TokenMatrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < d; ++c) x(i, c) = levels > 0 ? coarse(rng) : g(rng);
  return x;
}

std::vector<Index> random_dst(Index n, Index k, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

TEST(Bsm, RatioZeroIsEmpty) {
  const TokenPairSet p = bsm_match(random_tokens(10, 3, 0), 0.0, 1);
  EXPECT_TRUE(p.pairs.empty());
  EXPECT_EQ(p.reduced_count, 0);
}

TEST(Bsm, DuplicatesAcrossSetsGiveZeroLoss) {
  TokenMatrix x(4, 2);
  x << 1, 0, 1, 0, 0, 5, 0, 5;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DstSrcSplit split = [&] {
      DatmConfig c;
      c.k_dst = 2;
      c.seed = seed;
      return datm_init(x, c);
    }();
    // Same shuffle as bsm_match with a 0.5 dst fraction.
    const bool separated = (std::count(split.dst.begin(), split.dst.end(), 0) + std::count(split.dst.begin(), split.dst.end(), 1)) == 1;
    if (!separated) continue;
    const TokenPairSet p = bsm_match(x, 0.25, seed);
    ASSERT_EQ(p.pairs.size(), 1u);
    EXPECT_EQ(p.pairs[0].loss, 0.0);
  }
}

TEST(Bsm, MatchesStraightLineReference) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TokenMatrix x = random_tokens(64, 16, seed);
    const TokenPairSet p = bsm_match(x, 0.3, seed);
    EXPECT_EQ(p.pairs, oracle::bsm(x, 0.3, seed));
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(Bsm, RejectsTooFewTokensAndBadRatio) {
  EXPECT_THROW(bsm_match(random_tokens(1, 3, 0), 0.0, 0), std::invalid_argument);
  EXPECT_THROW(bsm_match(random_tokens(5, 3, 0), 1.0, 0), std::invalid_argument);
  EXPECT_THROW(bsm_match(random_tokens(5, 3, 0), -0.1, 0), std::invalid_argument);
}

TEST(DatmInit, CountsDeterminismAndErrors) {
  const TokenMatrix x = random_tokens(20, 2, 0);
  DatmConfig c;
  c.k_dst = 19;
  c.seed = 5;
  const DstSrcSplit a = datm_init(x, c);
  EXPECT_EQ(a.src.size(), 1u);
  const DstSrcSplit b = datm_init(x, c);
  EXPECT_EQ(a.dst, b.dst);
  c.k_dst = 20;
  EXPECT_THROW(datm_init(x, c), std::invalid_argument);
  c.k_dst = 0;
  EXPECT_THROW(datm_init(x, c), std::invalid_argument);
}

TEST(DatmInit, SeedsCoverEveryToken) {
  const TokenMatrix x = random_tokens(128, 1, 0);
  std::vector<int> hits(128, 0);
  DatmConfig c;
  c.k_dst = 16;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    c.seed = s;
    for (Index d : datm_init(x, c).dst) ++hits[d];
  }
  for (int h : hits) EXPECT_GT(h, 0);
}

TEST(DatmPairing, NearestNeighbourByInspection) {
  TokenMatrix x(4, 2);
  x << 0, 0, 0.1, 0, 5, 5, 5.1, 5;
  const std::vector<Index> dst{0, 2};
  const auto a = datm_pairing(x, dst);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].src, 1);
  EXPECT_EQ(a[0].dst, 0);
  EXPECT_NEAR(a[0].loss, 0.01, 1e-12);
  EXPECT_EQ(a[1].src, 3);
  EXPECT_EQ(a[1].dst, 2);
  EXPECT_NEAR(a[1].loss, 0.01, 1e-12);
}

TEST(DatmPairing, TieGoesToSmallerDst) {
  TokenMatrix x(4, 1);
  x << 9, -1, 0, 1;  // token 2 is equidistant from dst 1 and dst 3
  const std::vector<Index> dst{1, 3};
  const auto a = datm_pairing(x, dst);
  EXPECT_EQ(a[1].src, 2);
  EXPECT_EQ(a[1].dst, 1);
}

TEST(DatmPairing, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TokenMatrix x = random_tokens(256, 32, seed, seed % 2 ? 1 : 0);  // odd seeds force ties
    const auto dst = random_dst(256, 32, seed + 100);
    EXPECT_EQ(datm_pairing(x, dst), oracle::pairing(x, dst));
  }
}

TEST(DatmPairing, EmptyDstThrows) {
  EXPECT_THROW(datm_pairing(random_tokens(3, 2, 0), {}), std::invalid_argument);
}

TEST(DatmMeanLoss, ValuesAndErrors) {
  const std::vector<TokenPair> a{{1, 0, 0.01}, {3, 2, 0.01}};
  EXPECT_DOUBLE_EQ(datm_mean_loss(a), 0.01);
  EXPECT_THROW(datm_mean_loss({}), std::invalid_argument);
  const std::vector<TokenPair> zero{{1, 0, 0.0}, {2, 0, 0.0}};
  EXPECT_EQ(datm_mean_loss(zero), 0.0);
}

TEST(DatmUpdate, CollinearGroupMovesToMiddle) {
  TokenMatrix x(3, 2);
  x << 0, 0, 2, 0, 4, 0;
  const std::vector<Index> dst{0};
  const auto a = datm_pairing(x, dst);
  EXPECT_EQ(datm_update(x, a, dst), std::vector<Index>{1});
}

TEST(DatmUpdate, SingletonGroupStays) {
  TokenMatrix x(3, 1);
  x << 0, 0.1, 100;
  const std::vector<Index> dst{0, 2};
  const std::vector<TokenPair> a{{1, 0, 0.01}};
  EXPECT_EQ(datm_update(x, a, dst), dst);
}

TEST(DatmUpdate, MatchesGroupMeanOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TokenMatrix x = random_tokens(256, 32, seed, seed % 2 ? 1 : 0);
    const auto dst = random_dst(256, 32, seed + 7);
    const auto a = datm_pairing(x, dst);
    const auto next = datm_update(x, a, dst);
    EXPECT_EQ(next, oracle::update(x, a, dst));
    EXPECT_EQ(next.size(), dst.size());
  }
}

TEST(DatmMatch, DuplicateGroupsConvergeToZeroLoss) {
  const TokenMatrix x = clustered_tokens(64, 8, 4, 0.0, 3);
  DatmConfig c = DatmConfig::for_tokens(64, 0.5, 1);
  c.k_dst = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const DatmOutcome r = datm_match_detailed(x, c);
    // Every pair must link duplicates once each cluster holds a dst.
    if (r.pairs.mean_loss() == 0.0) {
      for (const TokenPair& p : r.pairs.pairs) EXPECT_EQ(p.loss, 0.0);
    }
  }
  c.seed = 0;
  c.k_dst = 16;  // plenty of dsts: all clusters are covered
  const DatmOutcome r = datm_match_detailed(x, c);
  EXPECT_EQ(r.pairs.mean_loss(), 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(DatmMatch, InfiniteEpsilonRunsOnePass) {
  const TokenMatrix x = random_tokens(40, 4, 2);
  DatmConfig c = DatmConfig::for_tokens(40, 0.4, 9);
  c.epsilon = std::numeric_limits<double>::infinity();
  const DatmOutcome r = datm_match_detailed(x, c);
  EXPECT_EQ(r.iterations, 1);
  const DstSrcSplit split = datm_init(x, c);
  const auto expected = top_k_select(datm_pairing(x, split.dst), 0.4, 40, split.dst);
  EXPECT_EQ(r.pairs, expected);
}

TEST(DatmMatch, MatchesOracleLoopAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TokenMatrix x = random_tokens(96, 8, seed, seed % 3 == 0 ? 2 : 0);
    DatmConfig c = DatmConfig::for_tokens(96, 0.5, seed);
    const TokenPairSet p = datm_match(x, c);
    EXPECT_EQ(p.pairs, oracle::datm(x, c.k_dst, 0.5, c.epsilon, c.max_iterations, seed));
    EXPECT_EQ(p, datm_match(x, c));
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.reduced_count, 48);
  }
}

TEST(DatmMatch, RespectsIterationCap) {
  const TokenMatrix x = random_tokens(200, 6, 4);
  DatmConfig c = DatmConfig::for_tokens(200, 0.5, 4);
  c.epsilon = 1e-300;
  c.max_iterations = 3;
  const DatmOutcome r = datm_match_detailed(x, c);
  EXPECT_LE(r.iterations, 3);
  EXPECT_EQ(r.loss_history.size(), static_cast<std::size_t>(r.iterations));
}

TEST(TopK, KeepsSmallestLosses) {
  const std::vector<TokenPair> c{{1, 0, 0.1}, {2, 0, 0.5}, {3, 0, 0.2}, {4, 0, 0.9}};
  const std::vector<Index> dst{0};
  const TokenPairSet p = top_k_select(c, 0.4, 5, dst);  // floor(0.4 * 5) = 2
  ASSERT_EQ(p.pairs.size(), 2u);
  EXPECT_EQ(p.pairs[0].src, 1);
  EXPECT_EQ(p.pairs[1].src, 3);
  EXPECT_TRUE(top_k_select(c, 0.0, 5, dst).pairs.empty());
}

TEST(TopK, TooFewCandidatesKeepsAllAndRecordsRatio) {
  const std::vector<TokenPair> c{{1, 0, 0.1}};
  const std::vector<Index> dst{0};
  const TokenPairSet p = top_k_select(c, 0.9, 10, dst);
  EXPECT_EQ(p.reduced_count, 1);
  EXPECT_DOUBLE_EQ(p.realized_ratio, 0.1);
}

TEST(TopK, MatchesSortOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> loss(0, 5);  // many ties
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenPair> c;
    for (Index s = 1; s < 60; ++s) c.push_back({s, 0, static_cast<double>(loss(rng))});
    const std::vector<Index> dst{0};
    EXPECT_EQ(top_k_select(c, 0.3, 60, dst).pairs, oracle::top_k(c, 18));
  }
}

TEST(PairSet, ValidateCatchesBrokenSets) {
  TokenPairSet p;
  p.n_tokens = 4;
  p.dst_set = {0};
  p.pairs = {{1, 0, 0.0}};
  p.reduced_count = 1;
  EXPECT_NO_THROW(p.validate());
  p.pairs = {{0, 0, 0.0}};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.pairs = {{1, 2, 0.0}};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.pairs = {{1, 0, 0.0}, {1, 0, 0.0}};
  p.reduced_count = 2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.pairs = {{5, 0, 0.0}};
  p.reduced_count = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(MatchingQuality, DuplicatesEmptyAndMismatch) {
  TokenMatrix out(3, 2);
  out << 1, 2, 1, 2, 7, 7;
  TokenPairSet p;
  p.n_tokens = 3;
  p.dst_set = {0};
  p.pairs = {{1, 0, 0.0}};
  p.reduced_count = 1;
  EXPECT_EQ(matching_quality(p, out), 0.0);
  p.pairs.clear();
  p.reduced_count = 0;
  EXPECT_EQ(matching_quality(p, out), 0.0);
  p.n_tokens = 4;
  EXPECT_THROW(matching_quality(p, out), std::invalid_argument);
}

}  // namespace
}  // namespace orbis
