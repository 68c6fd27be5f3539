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

#include "orbis/trajectory.hpp"

#include <random>
#include <stdexcept>

namespace orbis {

namespace {

TokenMatrix gaussian(Index rows, Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  TokenMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = normal(rng);
  return m;
}

TokenMatrix cluster_noise(Index n, Index d, Index n_clusters, double spread, std::mt19937_64& rng) {
  const TokenMatrix centers = gaussian(n_clusters, d, 1.0, rng);
  std::uniform_int_distribution<Index> pick(0, n_clusters - 1);
  std::normal_distribution<double> normal(0.0, spread);
  TokenMatrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    const Index c = pick(rng);
    for (Index j = 0; j < d; ++j) x(i, j) = centers(c, j) + normal(rng);
  }
  return x;
}

std::mt19937_64 layer_rng(std::uint64_t seed, Index layer, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(layer), stream};
  return std::mt19937_64(seq);
}

}  // namespace

void WorkloadDesc::validate() const {
  if (n_tokens < 1 || n_channels < 1 || n_heads < 1 || n_layers < 1 || n_timesteps < 0) {
    throw std::invalid_argument("workload: extents must be positive");
  }
  if (n_channels % n_heads != 0) {
    throw std::invalid_argument("workload: n_channels must be divisible by n_heads");
  }
  if (n_text_tokens < 0 || n_text_tokens >= n_tokens) {
    throw std::invalid_argument("workload: text tokens must leave at least one visual token");
  }
}

WorkloadDesc WorkloadDesc::toy() { return WorkloadDesc{}; }

void TrajectoryConfig::validate() const {
  if (!(temporal_consistency >= 0.0 && temporal_consistency <= 1.0)) {
    throw std::invalid_argument("trajectory: temporal consistency must lie in [0, 1]");
  }
  if (n_clusters < 1) throw std::invalid_argument("trajectory: n_clusters must be positive");
  if (!(noise_scale > 0.0)) throw std::invalid_argument("trajectory: noise_scale must be positive");
  if (!(input_noise >= 0.0)) throw std::invalid_argument("trajectory: input_noise must be non-negative");
  if (!(input_gain > 0.0)) throw std::invalid_argument("trajectory: input_gain must be positive");
}

TokenMatrix clustered_tokens(Index n_tokens, Index n_channels, Index n_clusters, double spread,
                             std::uint64_t seed) {
  if (n_tokens < 1 || n_channels < 1 || n_clusters < 1 || !(spread >= 0.0)) {
    throw std::invalid_argument("clustered_tokens: invalid shape");
  }
  std::mt19937_64 rng(seed);
  if (spread == 0.0) {
    // Exact duplicates: every token is one of the centers.
    const TokenMatrix centers = gaussian(n_clusters, n_channels, 1.0, rng);
    TokenMatrix x(n_tokens, n_channels);
    std::uniform_int_distribution<Index> pick(0, n_clusters - 1);
    for (Index i = 0; i < n_tokens; ++i) x.row(i) = centers.row(pick(rng));
    return x;
  }
  return cluster_noise(n_tokens, n_channels, n_clusters, spread, rng);
}

Trajectory synth_trajectory(const TrajectoryConfig& cfg, const WorkloadDesc& wl) {
  cfg.validate();
  wl.validate();
  const Index n = wl.n_tokens;
  const Index d = wl.n_channels;
  const double alpha = cfg.temporal_consistency;

  Trajectory traj;
  traj.frames.assign(static_cast<std::size_t>(wl.n_timesteps),
                     std::vector<TrajectoryFrame>(static_cast<std::size_t>(wl.n_layers)));
  for (Index layer = 0; layer < wl.n_layers; ++layer) {
    auto out_rng = layer_rng(cfg.seed, layer, 0);
    auto in_rng = layer_rng(cfg.seed, layer, 1);
    const TokenMatrix mixing = gaussian(d, d, 1.0 / std::sqrt(double(d)), in_rng);

    TokenMatrix state;
    for (Index t = 0; t < wl.n_timesteps; ++t) {
      TokenMatrix fresh = cluster_noise(n, d, cfg.n_clusters, cfg.noise_scale, out_rng);
      if (t == 0) {
        state = std::move(fresh);
      } else {
        state = alpha * state + (1.0 - alpha) * fresh;
      }
      const double rms = std::sqrt(state.squaredNorm() / double(state.size()));
      const double gain = rms > 0.0 ? cfg.input_gain / rms : 0.0;
      TokenMatrix input = ((gain * state) * mixing).array().tanh().matrix();
      input += gaussian(n, d, 1.0, in_rng) * cfg.input_noise;

      auto& frame = traj.frames[t][layer];
      frame.output = state;
      frame.input = std::move(input);
    }
  }
  return traj;
}

}  // namespace orbis
