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

#include "orbis/pipeline.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "orbis/quantization.hpp"

namespace orbis {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double mean_row_sqdiff(const TokenMatrix& a, const TokenMatrix& b) {
  return (a - b).rowwise().squaredNorm().mean();
}

}  // namespace

std::string_view to_string(StepKind kind) { return kind == StepKind::Full ? "FC" : "RC"; }

Schedule Schedule::standard(Index n_timesteps, int rc_per_fc) {
  if (rc_per_fc < 1) throw std::invalid_argument("schedule: rc_per_fc must be positive");
  Schedule s;
  s.rc_per_fc = rc_per_fc;
  for (Index t = 0; t < n_timesteps; ++t) {
    s.steps.push_back(t % (rc_per_fc + 1) == 0 ? StepKind::Full : StepKind::Reduced);
  }
  return s;
}

Schedule Schedule::all_full(Index n_timesteps) {
  Schedule s;
  s.steps.assign(static_cast<std::size_t>(n_timesteps), StepKind::Full);
  return s;
}

void Schedule::validate() const {
  if (rc_per_fc < 1) throw std::invalid_argument("schedule: rc_per_fc must be positive");
  int since_fc = -1;
  for (StepKind k : steps) {
    if (k == StepKind::Full) {
      since_fc = 0;
    } else {
      if (since_fc < 0) throw std::invalid_argument("schedule: RC step before any FC step");
      if (++since_fc > rc_per_fc) throw std::invalid_argument("schedule: RC step outside the pair reuse window");
    }
  }
}

TokenMatrix sdpa(const TokenMatrix& q, const TokenMatrix& k, const TokenMatrix& v, Index n_heads) {
  if (n_heads < 1 || q.cols() != k.cols() || k.cols() != v.cols() || q.cols() % n_heads != 0) {
    throw std::invalid_argument("sdpa: channel counts must match and divide into heads");
  }
  if (k.rows() != v.rows() || k.rows() < 1) {
    throw std::invalid_argument("sdpa: key and value lengths must match");
  }
  const Index dh = q.cols() / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  TokenMatrix out(q.rows(), q.cols());
  for (Index h = 0; h < n_heads; ++h) {
    const auto qh = q.middleCols(h * dh, dh);
    const auto kh = k.middleCols(h * dh, dh);
    const auto vh = v.middleCols(h * dh, dh);
    Eigen::MatrixXd scores = (qh * kh.transpose()) * scale;
    for (Index i = 0; i < scores.rows(); ++i) {
      const double m = scores.row(i).maxCoeff();
      scores.row(i) = (scores.row(i).array() - m).exp();
      scores.row(i) /= scores.row(i).sum();
    }
    out.middleCols(h * dh, dh) = scores * vh;
  }
  return out;
}

LayerWeights LayerWeights::random(Index n_channels, std::uint64_t seed, Index layer) {
  std::mt19937_64 rng(mix_seed(seed, 0x5eed, static_cast<std::uint64_t>(layer)));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n_channels)));
  auto draw = [&] {
    Eigen::MatrixXd w(n_channels, n_channels);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
    return w;
  };
  LayerWeights w;
  w.wq = draw();
  w.wk = draw();
  w.wv = draw();
  return w;
}

TokenMatrix attention_block(const TokenMatrix& stream, const LayerWeights& w, Index n_heads,
                            const TokenPairSet* pairs) {
  if (pairs == nullptr) {
    return sdpa(stream * w.wq, stream * w.wk, stream * w.wv, n_heads);
  }
  const TokenMatrix kept = reduce(stream, *pairs);
  const TokenMatrix y = sdpa(kept * w.wq, kept * w.wk, kept * w.wv, n_heads);
  return restore(y, *pairs);
}

std::string_view to_string(MatcherKind kind) {
  switch (kind) {
    case MatcherKind::Bsm: return "bsm";
    case MatcherKind::Datm: return "datm";
    case MatcherKind::DatmQuantized: return "datm-q";
  }
  return "?";
}

std::string_view to_string(Guidance guidance) {
  return guidance == Guidance::Output ? "output" : "input";
}

MatcherKind parse_matcher(std::string_view name) {
  if (name == "bsm") return MatcherKind::Bsm;
  if (name == "datm") return MatcherKind::Datm;
  if (name == "datm-q") return MatcherKind::DatmQuantized;
  throw std::invalid_argument("unknown matcher '" + std::string(name) + "' (bsm, datm, datm-q)");
}

Guidance parse_guidance(std::string_view name) {
  if (name == "output") return Guidance::Output;
  if (name == "input") return Guidance::Input;
  throw std::invalid_argument("unknown guidance '" + std::string(name) + "' (output, input)");
}

TokenPairSet match_tokens(const TokenMatrix& x, Index n_visual, const PipelineOptions& opt,
                          std::uint64_t seed) {
  if (n_visual < 2 || n_visual > x.rows()) {
    throw std::invalid_argument("match_tokens: need at least two visual tokens");
  }
  const TokenMatrix visual = x.topRows(n_visual);
  TokenPairSet pairs;
  if (opt.matcher == MatcherKind::Bsm) {
    pairs = bsm_match(visual, opt.reduction_ratio, seed);
  } else {
    DatmConfig cfg;
    cfg.k_dst = std::clamp<Index>(
        static_cast<Index>(std::ceil(opt.k_dst_fraction * static_cast<double>(n_visual))), 1, n_visual - 1);
    cfg.reduction_ratio = opt.reduction_ratio;
    cfg.epsilon = opt.epsilon;
    cfg.max_iterations = opt.max_iterations;
    cfg.seed = seed;
    pairs = opt.matcher == MatcherKind::Datm ? datm_match(visual, cfg) : datm_match_quantized(visual, cfg).pairs;
  }
  pairs.n_tokens = x.rows();
  pairs.realized_ratio = static_cast<double>(pairs.reduced_count) / static_cast<double>(x.rows());
  return pairs;
}

RunResult run_pipeline(const Trajectory& traj, const WorkloadDesc& wl, const Schedule& sched,
                       const PipelineOptions& opt) {
  wl.validate();
  sched.validate();
  if (static_cast<Index>(sched.steps.size()) > traj.n_timesteps() || traj.n_layers() != wl.n_layers) {
    throw std::invalid_argument("run_pipeline: trajectory does not cover the schedule");
  }

  RunResult result;
  result.options = opt;
  result.final_outputs.resize(static_cast<std::size_t>(wl.n_layers));
  std::vector<LayerWeights> weights;
  for (Index l = 0; l < wl.n_layers; ++l) weights.push_back(LayerWeights::random(wl.n_channels, opt.seed, l));

  std::vector<TokenPairSet> stored(static_cast<std::size_t>(wl.n_layers));
  std::vector<char> have_pairs(static_cast<std::size_t>(wl.n_layers), 0);
  int rc_since_fc = 0;

  for (Index t = 0; t < static_cast<Index>(sched.steps.size()); ++t) {
    const StepKind kind = sched.steps[t];
    rc_since_fc = kind == StepKind::Full ? 0 : rc_since_fc + 1;
    for (Index l = 0; l < wl.n_layers; ++l) {
      const TrajectoryFrame& frame = traj.at(t, l);
      const TokenMatrix full = attention_block(frame.output, weights[l], wl.n_heads);
      const std::uint64_t seed = mix_seed(opt.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(l));

      StepRecord rec;
      rec.timestep = t;
      rec.layer = l;
      rec.kind = kind;
      TokenMatrix out;
      if (kind == StepKind::Full) {
        out = full;
        if (opt.guidance == Guidance::Output) {
          stored[l] = match_tokens(full, wl.visual_tokens(), opt, seed);
          have_pairs[l] = 1;
          rec.mean_pair_loss = stored[l].mean_loss();
          rec.matching_quality = matching_quality(stored[l], full);
        }
      } else {
        TokenPairSet pairs;
        if (opt.guidance == Guidance::Output) {
          if (!have_pairs[l] || rc_since_fc > sched.rc_per_fc) {
            throw std::logic_error("run_pipeline: RC step without pairs from a recent FC step");
          }
          pairs = stored[l];
        } else {
          pairs = match_tokens(frame.input, wl.visual_tokens(), opt, seed);
        }
        out = attention_block(frame.output, weights[l], wl.n_heads, &pairs);
        rec.mean_pair_loss = pairs.mean_loss();
        rec.matching_quality = matching_quality(pairs, full);
        rec.reduced_tokens = pairs.reduced_count;
        rec.output_error = mean_row_sqdiff(out, full);
      }
      result.records.push_back(rec);
      result.final_outputs[l] = std::move(out);
    }
  }
  return result;
}

RunResult run_pipeline(const TrajectoryConfig& tcfg, const WorkloadDesc& wl, const Schedule& sched,
                       const PipelineOptions& opt) {
  return run_pipeline(synth_trajectory(tcfg, wl), wl, sched, opt);
}

void write_run_csv(std::ostream& out, const RunResult& result) {
  out << "# orbis-csv v1 pipeline\n" << kPipelineCsvHeader << '\n';
  const auto& o = result.options;
  for (const StepRecord& r : result.records) {
    out << r.timestep << ',' << r.layer << ',' << to_string(r.kind) << ',' << to_string(o.matcher) << ','
        << to_string(o.guidance) << ',' << o.reduction_ratio << ',' << r.mean_pair_loss << ','
        << r.matching_quality << ',' << r.reduced_tokens << ',' << r.output_error << '\n';
  }
}

}  // namespace orbis
