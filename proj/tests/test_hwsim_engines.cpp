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

#include <algorithm>
#include <random>
#include <sstream>

#include "orbis/hwsim/bitonic.hpp"
#include "orbis/hwsim/config.hpp"
#include "orbis/hwsim/engines.hpp"
#include "orbis/hwsim/micro_sim.hpp"
#include "orbis/trajectory.hpp"

namespace orbis::hwsim {
namespace {

HardwareConfig small_config(std::mt19937_64& rng) {
  auto u = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  HardwareConfig cfg;
  cfg.sa_rows = u(1, 8);
  cfg.sa_cols = u(1, 8);
  cfg.vpu_lanes = u(1, 16);
  cfg.dau_lanes = u(1, 16);
  cfg.dau_pipeline_depth = u(1, 10);
  cfg.qe_divide_latency = u(1, 12);
  cfg.sorter_width = std::int64_t{1} << u(1, 5);
  return cfg;
}

TEST(SystolicArray, SpecShapes) {
  HardwareConfig cfg;
  EXPECT_EQ(sa_gemm_cycles(64, 64, 64, cfg), 190);
  EXPECT_EQ(simulate_systolic_gemm(64, 64, 64, cfg), 190);
  cfg.sa_rows = cfg.sa_cols = 1;
  EXPECT_EQ(sa_gemm_cycles(1, 1, 1, cfg), 1);
  EXPECT_EQ(simulate_systolic_gemm(1, 1, 1, cfg), 1);
  HardwareConfig d;
  EXPECT_EQ(sa_gemm_cycles(128, 64, 64, d), 2 * sa_gemm_cycles(64, 64, 64, d));
}

TEST(SystolicArray, ClosedFormMatchesMicroSim) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 150; ++trial) {
    const HardwareConfig cfg = small_config(rng);
    std::uniform_int_distribution<std::int64_t> dim(1, 20);
    const auto m = dim(rng), n = dim(rng), k = dim(rng);
    EXPECT_EQ(sa_gemm_cycles(m, n, k, cfg), simulate_systolic_gemm(m, n, k, cfg)) << m << ' ' << n << ' ' << k;
  }
}

TEST(SystolicArray, FunctionalProductMatchesEigen) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const HardwareConfig cfg = small_config(rng);
    std::uniform_int_distribution<Eigen::Index> dim(1, 12);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(dim(rng), dim(rng));
    const Eigen::MatrixXd b = Eigen::MatrixXd::Random(a.cols(), dim(rng));
    const SystolicRun run = simulate_systolic_gemm(a, b, cfg);
    EXPECT_TRUE(run.product.isApprox(a * b, 1e-12));
    EXPECT_EQ(run.cycles, sa_gemm_cycles(a.rows(), b.cols(), a.cols(), cfg));
  }
}

TEST(Dau, SpecShapes) {
  HardwareConfig cfg;
  cfg.dau_lanes = 64;
  cfg.dau_pipeline_depth = 8;
  EXPECT_EQ(dau_pipeline_cycles(4, 12, 64, cfg), 55);
  EXPECT_EQ(simulate_dau(4, 12, 64, cfg), 55);
  EXPECT_EQ(dau_pipeline_cycles(4, 0, 64, cfg), 0);
  EXPECT_EQ(simulate_dau(4, 0, 64, cfg), 0);
}

TEST(Dau, MonotoneInEachArgument) {
  HardwareConfig cfg;
  cfg.dau_lanes = 16;
  for (std::int64_t a = 1; a < 6; ++a) {
    for (std::int64_t b = 0; b < 6; ++b) {
      for (std::int64_t c = 1; c < 40; c += 7) {
        const Cycles base = dau_pipeline_cycles(a, b, c, cfg);
        EXPECT_LE(base, dau_pipeline_cycles(a + 1, b, c, cfg));
        EXPECT_LE(base, dau_pipeline_cycles(a, b + 1, c, cfg));
        EXPECT_LE(base, dau_pipeline_cycles(a, b, c + 1, cfg));
      }
    }
  }
}

TEST(Dau, ClosedFormMatchesMicroSim) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const HardwareConfig cfg = small_config(rng);
    std::uniform_int_distribution<std::int64_t> dim(1, 12);
    const auto d = dim(rng), s = dim(rng) - 1, c = dim(rng) * 3;
    EXPECT_EQ(dau_pipeline_cycles(d, s, c, cfg), simulate_dau(d, s, c, cfg));
  }
}

TEST(Dau, FunctionalAssignmentMatchesPairingOnDequantizedData) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HardwareConfig cfg = small_config(rng);
    const TokenMatrix x = clustered_tokens(40, 12, 5, 0.3, seed);
    const QuantizedActivation q = quantize_channelwise(x);
    std::vector<Index> dst = {1, 7, 13, 22, 30};
    const DauRun run = simulate_dau(q, dst, cfg);
    EXPECT_EQ(run.assignment, datm_pairing(dequantize(q), dst));
    EXPECT_EQ(run.cycles, dau_pipeline_cycles(5, 35, 12, cfg));
  }
}

TEST(Bitonic, SpecShapes) {
  HardwareConfig cfg;
  const BitonicCost eight = bitonic_topk_cycles(8, cfg);
  EXPECT_EQ(eight.padded, 8);
  EXPECT_EQ(eight.stages, 6);
  EXPECT_EQ(eight.comparators, 24);
  EXPECT_EQ(BitonicNetwork::build(8).comparator_count(), 24);
  EXPECT_EQ(BitonicNetwork::build(8).stages.size(), 6u);
  const BitonicCost two = bitonic_topk_cycles(2, cfg);
  EXPECT_EQ(two.stages, 1);
  EXPECT_EQ(two.comparators, 1);
  EXPECT_EQ(bitonic_topk_cycles(5, cfg).padded, 8);
}

TEST(Bitonic, SortsEveryPermutationOfEight) {
  std::vector<double> v = {0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> sorted = v;
  int count = 0;
  do {
    ASSERT_EQ(bitonic_sort(v), sorted);
    ++count;
  } while (std::next_permutation(v.begin(), v.end()));
  EXPECT_EQ(count, 40320);
}

TEST(Bitonic, ClosedFormMatchesMicroSim) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const HardwareConfig cfg = small_config(rng);
    const auto n = std::uniform_int_distribution<std::int64_t>(2, 300)(rng);
    EXPECT_EQ(bitonic_topk_cycles(n, cfg).cycles, simulate_bitonic(n, cfg)) << n;
  }
}

TEST(Bitonic, TopKMatchesLibrarySelection) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenPair> c;
    std::uniform_int_distribution<int> loss(0, 9);  // many ties
    for (Index s = 0; s < 37; ++s) c.push_back({s, 0, static_cast<double>(loss(rng))});
    const auto k = std::uniform_int_distribution<std::int64_t>(0, 37)(rng);
    std::vector<TokenPair> expected = c;
    std::stable_sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.loss < b.loss; });
    expected.resize(static_cast<std::size_t>(k));
    std::sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.src < b.src; });
    auto got = bitonic_top_k(c, k);
    std::sort(got.begin(), got.end(), [](auto& a, auto& b) { return a.src < b.src; });
    EXPECT_EQ(got, expected);
  }
}

TEST(QuantEngine, SpecShapes) {
  HardwareConfig cfg;
  cfg.vpu_lanes = 16;
  EXPECT_EQ(qe_cycles(1, 16, cfg), 2 + cfg.qe_divide_latency);
  EXPECT_EQ(qe_cycles(64, 16, cfg) - cfg.qe_divide_latency, 2 * (qe_cycles(32, 16, cfg) - cfg.qe_divide_latency));
}

TEST(QuantEngine, ClosedFormMatchesMicroSim) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const HardwareConfig cfg = small_config(rng);
    std::uniform_int_distribution<std::int64_t> dim(1, 40);
    const auto n = dim(rng), d = dim(rng);
    EXPECT_EQ(qe_cycles(n, d, cfg), simulate_quant_engine(n, d, cfg));
  }
}

TEST(QuantEngine, FunctionalResultMatchesLibrary) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HardwareConfig cfg = small_config(rng);
    const TokenMatrix x = clustered_tokens(17, 9, 3, 0.4, seed);
    const QuantRun run = simulate_quant_engine(x, cfg);
    const QuantizedActivation expected = quantize_channelwise(x);
    EXPECT_EQ(run.result.codes, expected.codes);
    EXPECT_EQ(run.result.scales, expected.scales);
    EXPECT_EQ(run.cycles, qe_cycles(17, 9, cfg));
  }
}

TEST(Engines, MatchingCostsArePositiveAndOrdered) {
  HardwareConfig cfg;
  const DatmShape s = datm_shape(2048, 3072, cfg);
  EXPECT_EQ(s.n_dst + s.n_src, 2048);
  EXPECT_GT(datm_engine_cycles(s, cfg), 0);
  // The vector unit is far narrower than the DAU, so running DATM on it costs more.
  EXPECT_GT(datm_vpu_cycles(s, cfg), datm_engine_cycles(s, cfg));
  EXPECT_GT(bsm_vpu_cycles(2048, 3072, cfg), 0);
}

TEST(Config, DefaultsValidate) {
  HardwareConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.sa_rows, 64);
  EXPECT_EQ(cfg.n_instances, 38);
  EXPECT_DOUBLE_EQ(cfg.dram_pj_per_bit, 3.9);
}

TEST(Config, SetAndRoundTripKeys) {
  HardwareConfig cfg;
  cfg.set("sa_rows", "32");
  cfg.set("energy.sa_mac", "0.5");
  cfg.set("area.qe_unit", "0.25");
  EXPECT_EQ(cfg.sa_rows, 32);
  EXPECT_DOUBLE_EQ(cfg.energy_table.at("sa_mac"), 0.5);
  EXPECT_DOUBLE_EQ(cfg.area_table.at("qe_unit"), 0.25);
  HardwareConfig other;
  for (const auto& [k, v] : cfg.to_key_values()) other.set(k, v);
  EXPECT_EQ(other.to_key_values(), cfg.to_key_values());
}

TEST(Config, RejectsBadValues) {
  HardwareConfig cfg;
  EXPECT_THROW(cfg.set("no_such_key", "1"), std::invalid_argument);
  EXPECT_THROW(cfg.set("sa_rows", "abc"), std::invalid_argument);
  cfg.sorter_width = 48;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.sorter_width = 64;
  cfg.vpu_lanes = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Config, ParsesKeyValueText) {
  std::istringstream in("# comment\n\nsa_rows = 16\n  energy.vpu_op=2.5  # trailing\n");
  const auto kv = parse_key_values(in);
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("sa_rows"), "16");
  EXPECT_EQ(kv.at("energy.vpu_op"), "2.5");
  std::istringstream bad("just words\n");
  EXPECT_THROW(parse_key_values(bad), std::invalid_argument);
}

}  // namespace
}  // namespace orbis::hwsim
