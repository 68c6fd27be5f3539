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
#include <string>
#include <vector>

#include "orbis/tensor.hpp"

namespace orbis {

/// Shape of a transformer workload. Text tokens sit after the visual tokens
/// and are never reduced.
struct WorkloadDesc {
  std::string name = "toy";
  Index n_tokens = 512;  // visual + text
  Index n_channels = 64;
  Index n_heads = 4;
  Index n_layers = 4;
  Index n_timesteps = 8;
  Index n_text_tokens = 0;

  Index visual_tokens() const { return n_tokens - n_text_tokens; }
  Index head_dim() const { return n_channels / n_heads; }
  void validate() const;

  /// 512 tokens, 64 channels, 4 heads, 4 layers, 8 timesteps.
  static WorkloadDesc toy();
};

/// Synthetic stand-in for per-layer activations of a denoising run.
struct TrajectoryConfig {
  double temporal_consistency = 0.9;  // alpha
  Index n_clusters = 16;
  double noise_scale = 0.3;   // within-cluster spread of the output stream
  double input_noise = 0.6;   // independent noise on the input proxy
  double input_gain = 1.5;    // pre-tanh gain of the input mixing
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrajectoryFrame {
  TokenMatrix input;
  TokenMatrix output;
};

struct Trajectory {
  std::vector<std::vector<TrajectoryFrame>> frames;  // [timestep][layer]

  Index n_timesteps() const { return static_cast<Index>(frames.size()); }
  Index n_layers() const { return frames.empty() ? 0 : static_cast<Index>(frames.front().size()); }
  const TrajectoryFrame& at(Index t, Index layer) const { return frames[t][layer]; }
};

/// Per layer: O_0 is cluster-structured noise and
///   O_t = alpha * O_{t-1} + (1 - alpha) * F_t
/// with F_t fresh cluster-structured noise (new centers, new assignment).
/// The input is a fixed per-layer mixing tanh(g * O_t / rms(O_t) * M) plus
/// independent Gaussian noise. Deterministic per seed.
Trajectory synth_trajectory(const TrajectoryConfig& cfg, const WorkloadDesc& wl);

/// Cluster-structured Gaussian tokens: n_clusters centers ~ N(0, 1), each
/// token a random center plus spread * N(0, 1).
TokenMatrix clustered_tokens(Index n_tokens, Index n_channels, Index n_clusters, double spread,
                             std::uint64_t seed);

}  // namespace orbis
