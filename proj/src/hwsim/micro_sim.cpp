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

#include "orbis/hwsim/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "orbis/hwsim/bitonic.hpp"

namespace orbis::hwsim {

namespace {

struct Lane {
  double value = 0.0;
  bool valid = false;
};

// One output tile. Returns the cycles until every PE has consumed k operand pairs.
Cycles run_tile(const Eigen::MatrixXd* a, const Eigen::MatrixXd* b, std::int64_t row0, std::int64_t col0,
                std::int64_t k, const HardwareConfig& cfg, Eigen::MatrixXd* c) {
  const std::int64_t R = cfg.sa_rows;
  const std::int64_t C = cfg.sa_cols;
  std::vector<Lane> a_reg(static_cast<std::size_t>(R * C)), b_reg(a_reg.size());
  std::vector<Lane> a_next(a_reg.size()), b_next(a_reg.size());
  std::vector<double> acc(a_reg.size(), 0.0);
  std::vector<std::int64_t> done(a_reg.size(), 0);
  std::int64_t remaining = R * C;
  auto at = [C](std::int64_t r, std::int64_t col) { return static_cast<std::size_t>(r * C + col); };
  auto a_value = [&](std::int64_t r, std::int64_t s) {
    const std::int64_t i = row0 + r;
    return (a != nullptr && i < a->rows()) ? (*a)(i, s) : 0.0;
  };
  auto b_value = [&](std::int64_t s, std::int64_t col) {
    const std::int64_t j = col0 + col;
    return (b != nullptr && j < b->cols()) ? (*b)(s, j) : 0.0;
  };

  Cycles t = 0;
  while (remaining > 0) {
    // Shift: A moves right, B moves down; edges take skewed inputs.
    for (std::int64_t r = 0; r < R; ++r) {
      for (std::int64_t col = 0; col < C; ++col) {
        if (col == 0) {
          const std::int64_t s = t - r;
          a_next[at(r, col)] = (s >= 0 && s < k) ? Lane{a_value(r, s), true} : Lane{};
        } else {
          a_next[at(r, col)] = a_reg[at(r, col - 1)];
        }
        if (r == 0) {
          const std::int64_t s = t - col;
          b_next[at(r, col)] = (s >= 0 && s < k) ? Lane{b_value(s, col), true} : Lane{};
        } else {
          b_next[at(r, col)] = b_reg[at(r - 1, col)];
        }
      }
    }
    std::swap(a_reg, a_next);
    std::swap(b_reg, b_next);
    for (std::size_t p = 0; p < a_reg.size(); ++p) {
      if (a_reg[p].valid && b_reg[p].valid) {
        acc[p] += a_reg[p].value * b_reg[p].value;
        if (++done[p] == k) --remaining;
      }
    }
    ++t;
  }
  if (c != nullptr) {
    for (std::int64_t r = 0; r < R && row0 + r < c->rows(); ++r)
      for (std::int64_t col = 0; col < C && col0 + col < c->cols(); ++col) (*c)(row0 + r, col0 + col) = acc[at(r, col)];
  }
  return t;
}

Cycles run_systolic(const Eigen::MatrixXd* a, const Eigen::MatrixXd* b, std::int64_t m, std::int64_t n,
                    std::int64_t k, const HardwareConfig& cfg, Eigen::MatrixXd* c) {
  if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("systolic model: dimensions must be positive");
  Cycles total = 0;
  for (std::int64_t col0 = 0; col0 < n; col0 += cfg.sa_cols)
    for (std::int64_t row0 = 0; row0 < m; row0 += cfg.sa_rows) total += run_tile(a, b, row0, col0, k, cfg, c);
  return total;
}

struct DauItem {
  Index src = 0;
  Index dst = 0;
  std::int64_t chunk = 0;
  bool last_chunk = false;
};

template <typename OnRetire>
Cycles run_dau(std::int64_t n_items, const HardwareConfig& cfg, const std::function<DauItem(std::int64_t)>& issue,
               OnRetire&& on_retire) {
  if (n_items == 0) return 0;
  std::deque<std::optional<DauItem>> stages(static_cast<std::size_t>(cfg.dau_pipeline_depth));
  std::int64_t issued = 0;
  std::int64_t retired = 0;
  Cycles t = 0;
  while (retired < n_items) {
    // Advance one clock: everything moves a stage, the head takes a new item.
    stages.pop_back();
    stages.push_front(issued < n_items ? std::optional<DauItem>(issue(issued++)) : std::nullopt);
    if (stages.back().has_value()) {
      on_retire(*stages.back());
      ++retired;
    }
    ++t;
  }
  return t;
}

}  // namespace

SystolicRun simulate_systolic_gemm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const HardwareConfig& cfg) {
  if (a.cols() != b.rows()) throw std::invalid_argument("systolic model: inner dimensions differ");
  SystolicRun run;
  run.product = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  run.cycles = run_systolic(&a, &b, a.rows(), b.cols(), a.cols(), cfg, &run.product);
  return run;
}

Cycles simulate_systolic_gemm(std::int64_t m, std::int64_t n, std::int64_t k, const HardwareConfig& cfg) {
  return run_systolic(nullptr, nullptr, m, n, k, cfg, nullptr);
}

DauRun simulate_dau(const QuantizedActivation& q, std::span<const Index> dst_set, const HardwareConfig& cfg) {
  q.validate();
  if (dst_set.empty()) throw std::invalid_argument("DAU model: dst set is empty");
  std::vector<char> is_dst(static_cast<std::size_t>(q.n_tokens()), 0);
  for (Index d : dst_set) is_dst[d] = 1;
  std::vector<Index> srcs;
  for (Index i = 0; i < q.n_tokens(); ++i)
    if (!is_dst[i]) srcs.push_back(i);

  const std::int64_t lanes = cfg.dau_lanes;
  const std::int64_t chunks = (q.n_channels() + lanes - 1) / lanes;
  const auto n_dst = static_cast<std::int64_t>(dst_set.size());
  const std::int64_t n_items = static_cast<std::int64_t>(srcs.size()) * n_dst * chunks;

  DauRun run;
  run.assignment.reserve(srcs.size());
  for (Index s : srcs) run.assignment.push_back({s, -1, std::numeric_limits<double>::infinity()});
  double pair_acc = 0.0;

  auto issue = [&](std::int64_t id) {
    const std::int64_t chunk = id % chunks;
    const std::int64_t pair = id / chunks;
    return DauItem{srcs[static_cast<std::size_t>(pair / n_dst)], dst_set[static_cast<std::size_t>(pair % n_dst)],
                   chunk, chunk == chunks - 1};
  };
  std::size_t src_slot = 0;
  auto retire = [&](const DauItem& item) {
    if (item.chunk == 0) pair_acc = 0.0;
    const Index c_end = std::min<Index>(q.n_channels(), (item.chunk + 1) * lanes);
    for (Index c = item.chunk * lanes; c < c_end; ++c) {
      const double d = static_cast<double>(q.codes(item.src, c)) * q.scales(c) -
                       static_cast<double>(q.codes(item.dst, c)) * q.scales(c);
      pair_acc += d * d;
    }
    if (!item.last_chunk) return;
    while (run.assignment[src_slot].src != item.src) ++src_slot;
    TokenPair& best = run.assignment[src_slot];
    if (pair_acc < best.loss) {
      best.loss = pair_acc;
      best.dst = item.dst;
    }
  };
  run.cycles = run_dau(n_items, cfg, issue, retire);
  return run;
}

Cycles simulate_dau(std::int64_t n_dst, std::int64_t n_src, std::int64_t n_channels, const HardwareConfig& cfg) {
  if (n_dst <= 0 || n_src <= 0 || n_channels <= 0) return 0;
  const std::int64_t chunks = (n_channels + cfg.dau_lanes - 1) / cfg.dau_lanes;
  auto issue = [](std::int64_t) { return DauItem{}; };
  return run_dau(n_dst * n_src * chunks, cfg, issue, [](const DauItem&) {});
}

Cycles simulate_bitonic(std::int64_t n, const HardwareConfig& cfg) {
  if (n < 2) throw std::invalid_argument("bitonic model needs at least two keys");
  std::int64_t width = 1;
  while (width < n) width <<= 1;
  const BitonicNetwork net = BitonicNetwork::build(width);
  const std::int64_t units = cfg.sorter_width / 2;
  Cycles t = 0;
  for (const auto& stage : net.stages) {
    std::deque<Comparator> pending(stage.begin(), stage.end());
    while (!pending.empty()) {
      for (std::int64_t u = 0; u < units && !pending.empty(); ++u) pending.pop_front();
      ++t;
    }
  }
  return t;
}

QuantRun simulate_quant_engine(
    const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& x,
    const HardwareConfig& cfg) {
  validate_tokens(x, "quantization engine");
  const Index n = x.rows();
  const Index d = x.cols();
  const std::int64_t total = n * d;
  const std::int64_t lanes = cfg.vpu_lanes;
  QuantRun run;
  Cycles t = 0;

  // Pass 1: max-abs, lanes elements per clock, row-major order.
  Eigen::VectorXd max_abs = Eigen::VectorXd::Zero(d);
  for (std::int64_t next = 0; next < total; ++t) {
    for (std::int64_t l = 0; l < lanes && next < total; ++l, ++next) {
      const Index i = next / d;
      const Index c = next % d;
      max_abs(c) = std::max(max_abs(c), std::abs(x(i, c)));
    }
  }

  // Scale divides: one non-pipelined divider per lane.
  Eigen::VectorXd scales(d);
  std::vector<std::int64_t> busy(static_cast<std::size_t>(lanes), 0);
  Index next_channel = 0;
  Index finished = 0;
  while (finished < d) {
    for (std::int64_t l = 0; l < lanes; ++l) {
      auto& b = busy[static_cast<std::size_t>(l)];
      if (b == 0 && next_channel < d) {
        const Index c = next_channel++;
        scales(c) = max_abs(c) > 0.0 ? max_abs(c) / kQuantMax : 1.0;
        b = cfg.qe_divide_latency;
      }
    }
    for (auto& b : busy) {
      if (b > 0 && --b == 0) ++finished;
    }
    ++t;
  }

  // Pass 2: scale and round.
  run.result.scales = scales;
  run.result.codes.resize(n, d);
  for (std::int64_t next = 0; next < total; ++t) {
    for (std::int64_t l = 0; l < lanes && next < total; ++l, ++next) {
      const Index i = next / d;
      const Index c = next % d;
      const double r = std::round(x(i, c) / scales(c));
      run.result.codes(i, c) = static_cast<std::int8_t>(std::clamp(r, -double(kQuantMax), double(kQuantMax)));
    }
  }
  run.cycles = t;
  return run;
}

Cycles simulate_quant_engine(std::int64_t n_tokens, std::int64_t n_channels, const HardwareConfig& cfg) {
  if (n_tokens < 1 || n_channels < 1) throw std::invalid_argument("quantization model: empty shape");
  return simulate_quant_engine(TokenMatrix::Zero(n_tokens, n_channels), cfg).cycles;
}

}  // namespace orbis::hwsim
