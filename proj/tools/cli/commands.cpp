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

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cli/kv_args.hpp"
#include "orbis/hwsim/report.hpp"
#include "orbis/pipeline.hpp"
#include "orbis/quantization.hpp"
#include "orbis/serialization.hpp"
#include "orbis/trajectory.hpp"

namespace orbis::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::string seeds = "0";
};

struct TrajectoryArgs {
  TrajectoryConfig traj;
  WorkloadDesc wl = WorkloadDesc::toy();
};

void add_trajectory_options(CLI::App* cmd, TrajectoryArgs& a) {
  cmd->add_option("--alpha", a.traj.temporal_consistency, "temporal consistency of the output stream")
      ->capture_default_str();
  cmd->add_option("--clusters", a.traj.n_clusters, "token clusters per frame")->capture_default_str();
  cmd->add_option("--noise", a.traj.noise_scale, "within-cluster spread")->capture_default_str();
  cmd->add_option("--input-noise", a.traj.input_noise, "noise on the input proxy")->capture_default_str();
  cmd->add_option("--input-gain", a.traj.input_gain, "input mixing gain")->capture_default_str();
  cmd->add_option("--tokens", a.wl.n_tokens, "tokens per frame")->capture_default_str();
  cmd->add_option("--text-tokens", a.wl.n_text_tokens, "trailing text tokens, never reduced")->capture_default_str();
  cmd->add_option("--channels", a.wl.n_channels, "channels per token")->capture_default_str();
  cmd->add_option("--heads", a.wl.n_heads, "attention heads")->capture_default_str();
  cmd->add_option("--layers", a.wl.n_layers, "layers")->capture_default_str();
  cmd->add_option("--timesteps", a.wl.n_timesteps, "denoising steps")->capture_default_str();
}

void add_matcher_options(CLI::App* cmd, PipelineOptions& p, std::string& matcher) {
  cmd->add_option("--matcher", matcher, "bsm, datm or datm-q")->capture_default_str();
  cmd->add_option("--ratio", p.reduction_ratio, "reduction ratio in [0, 1)")->capture_default_str();
  cmd->add_option("--max-iterations", p.max_iterations, "DATM iteration cap")->capture_default_str();
  cmd->add_option("--epsilon", p.epsilon, "DATM convergence threshold")->capture_default_str();
  cmd->add_option("--k-fraction", p.k_dst_fraction, "DATM dst count / tokens")->capture_default_str();
}

fs::path prepare_out_dir(const Globals& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

// One seed writes `stem.ext`; several write `stem_seed<s>.ext`.
fs::path per_seed_path(const fs::path& dir, const std::string& stem, const std::string& ext, std::uint64_t seed,
                       std::size_t n_seeds) {
  if (n_seeds == 1) return dir / (stem + ext);
  return dir / (stem + "_seed" + std::to_string(seed) + ext);
}

void write_text(const fs::path& path, const std::ostringstream& os) { io::write_file_atomically(path, os.str()); }

// --- match ------------------------------------------------------------------

struct MatchArgs {
  std::string input;
  Index tokens = 512;
  Index channels = 64;
  Index clusters = 16;
  double spread = 0.1;
  std::string matcher = "datm";
  PipelineOptions opt;
};

void cmd_match(const Globals& g, const MatchArgs& a, std::ostream& out) {
  const MatcherKind kind = parse_matcher(a.matcher);
  const auto seeds = parse_seed_list(g.seeds);
  const fs::path dir = prepare_out_dir(g);
  for (std::uint64_t seed : seeds) {
    const TokenMatrix x = a.input.empty() ? clustered_tokens(a.tokens, a.channels, a.clusters, a.spread, seed)
                                          : io::load_tokens(a.input);
    validate_tokens(x, "match input");
    TokenPairSet pairs;
    int iterations = 1;
    bool converged = true;
    if (kind == MatcherKind::Bsm) {
      pairs = bsm_match(x, a.opt.reduction_ratio, seed);
    } else {
      DatmConfig cfg = DatmConfig::for_tokens(x.rows(), a.opt.reduction_ratio, seed);
      cfg.k_dst = std::clamp<Index>(
          static_cast<Index>(std::ceil(a.opt.k_dst_fraction * static_cast<double>(x.rows()))), 1,
          std::max<Index>(1, x.rows() - 1));
      cfg.max_iterations = a.opt.max_iterations;
      cfg.epsilon = a.opt.epsilon;
      const DatmOutcome res = kind == MatcherKind::Datm ? datm_match_detailed(x, cfg) : datm_match_quantized(x, cfg);
      pairs = res.pairs;
      iterations = res.iterations;
      converged = res.converged;
    }
    const fs::path path = per_seed_path(dir, "pairs", ".orbp", seed, seeds.size());
    io::save_pairs(path, pairs);
    out << "seed=" << seed << " matcher=" << to_string(kind) << " n_tokens=" << x.rows()
        << " reduced_count=" << pairs.reduced_count << " mean_loss=" << std::setprecision(9) << pairs.mean_loss()
        << " iterations=" << iterations << " converged=" << (converged ? "true" : "false")
        << " pairs=" << path.string() << '\n';
  }
}

// --- similarity -------------------------------------------------------------

void cmd_similarity(const Globals& g, TrajectoryArgs a, std::ostream& out) {
  a.wl.validate();
  a.traj.validate();
  if (a.wl.n_timesteps < 2) throw std::invalid_argument("similarity needs at least two timesteps");
  const auto seeds = parse_seed_list(g.seeds);
  std::vector<double> corr_input(static_cast<std::size_t>(a.wl.n_layers), 0.0);
  std::vector<double> corr_prev(corr_input.size(), 0.0);
  double samples = 0.0;
  for (std::uint64_t seed : seeds) {
    a.traj.seed = seed;
    const Trajectory traj = synth_trajectory(a.traj, a.wl);
    for (Index t = 1; t < traj.n_timesteps(); ++t) {
      for (Index l = 0; l < traj.n_layers(); ++l) {
        const SimilarityMap truth = cosine_similarity_map(traj.at(t, l).output);
        corr_input[l] += map_correlation(cosine_similarity_map(traj.at(t, l).input), truth);
        corr_prev[l] += map_correlation(cosine_similarity_map(traj.at(t - 1, l).output), truth);
      }
    }
    samples += static_cast<double>(traj.n_timesteps() - 1);
  }
  std::ostringstream csv;
  csv.precision(10);
  csv << "# orbis-csv v1 similarity\nlayer,corr_input,corr_prev_output\n";
  double mean_in = 0.0;
  double mean_prev = 0.0;
  for (std::size_t l = 0; l < corr_input.size(); ++l) {
    csv << l << ',' << corr_input[l] / samples << ',' << corr_prev[l] / samples << '\n';
    mean_in += corr_input[l] / samples;
    mean_prev += corr_prev[l] / samples;
  }
  const fs::path path = prepare_out_dir(g) / "similarity.csv";
  write_text(path, csv);
  const auto n = static_cast<double>(corr_input.size());
  out << "mean corr_input=" << mean_in / n << " mean corr_prev_output=" << mean_prev / n << " csv=" << path.string()
      << '\n';
}

// --- pipeline ---------------------------------------------------------------

struct PipelineArgs {
  TrajectoryArgs traj;
  PipelineOptions opt;
  std::string matcher = "datm";
  std::string guidance = "output";
  int rc_per_fc = 3;
  std::string schedule = "standard";
};

Schedule make_schedule(const std::string& name, Index steps, int rc_per_fc) {
  if (name == "standard") return Schedule::standard(steps, rc_per_fc);
  if (name == "full") return Schedule::all_full(steps);
  throw std::invalid_argument("unknown schedule '" + name + "' (expected standard or full)");
}

void cmd_pipeline(const Globals& g, PipelineArgs a, std::ostream& out) {
  a.opt.matcher = parse_matcher(a.matcher);
  a.opt.guidance = parse_guidance(a.guidance);
  const Schedule sched = make_schedule(a.schedule, a.traj.wl.n_timesteps, a.rc_per_fc);
  const auto seeds = parse_seed_list(g.seeds);
  const fs::path dir = prepare_out_dir(g);
  for (std::uint64_t seed : seeds) {
    a.traj.traj.seed = seed;
    a.opt.seed = seed;
    const RunResult res = run_pipeline(a.traj.traj, a.traj.wl, sched, a.opt);
    std::ostringstream csv;
    write_run_csv(csv, res);
    const fs::path path = per_seed_path(dir, "pipeline", ".csv", seed, seeds.size());
    write_text(path, csv);
    double quality = 0.0;
    double error = 0.0;
    double rc = 0.0;
    for (const StepRecord& r : res.records) {
      if (r.kind != StepKind::Reduced) continue;
      quality += r.matching_quality;
      error += r.output_error;
      rc += 1.0;
    }
    out << "seed=" << seed << " rc_rows=" << rc << " mean_rc_matching_quality=" << (rc > 0 ? quality / rc : 0.0)
        << " mean_rc_output_error=" << (rc > 0 ? error / rc : 0.0) << " csv=" << path.string() << '\n';
  }
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string preset = "cogvideox-like";
  std::string variants = "a100-proxy,base,ogm,ogm-datm-nohw,all";
  hwsim::SimulateOptions opt;
  int rc_per_fc = 3;
  Index timesteps = -1;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  if (items.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return items;
}

void cmd_simulate(const Globals& g, const SimulateArgs& a, const hwsim::HardwareConfig& cfg, std::ostream& out) {
  const hwsim::HwWorkload wl = hwsim::hw_preset(a.preset);
  const Index steps = a.timesteps >= 0 ? a.timesteps : wl.model.n_timesteps;
  const Schedule sched = Schedule::standard(steps, a.rc_per_fc);
  std::vector<hwsim::RunReport> runs;
  for (const std::string& name : split_list(a.variants)) {
    runs.push_back(hwsim::simulate_run(wl, sched, hwsim::parse_variant(name), cfg, a.opt));
  }
  const hwsim::RunReport proxy = hwsim::simulate_run(wl, sched, hwsim::Variant::A100Proxy, cfg, a.opt);
  const hwsim::AreaReport area = hwsim::area_report(cfg);

  const fs::path dir = prepare_out_dir(g);
  std::ostringstream sim, energy, area_csv, timeline;
  hwsim::write_simulate_csv(sim, wl.model.name, runs, proxy);
  hwsim::write_energy_csv(energy, wl.model.name, runs);
  hwsim::write_area_csv(area_csv, area);
  hwsim::write_timeline_csv(timeline, wl.model.name, runs);
  write_text(dir / "simulate.csv", sim);
  write_text(dir / "energy.csv", energy);
  write_text(dir / "area.csv", area_csv);
  write_text(dir / "timeline.csv", timeline);

  out << "workload " << wl.model.name << ", " << steps << " steps, " << cfg.n_instances << " instances\n";
  out << std::left << std::setw(16) << "variant" << std::setw(8) << "ratio" << std::setw(12) << "speedup"
      << std::setw(12) << "energy" << "matching hidden\n";
  for (const hwsim::RunReport& r : runs) {
    const double speedup = r.seconds > 0.0 ? proxy.seconds / r.seconds : 0.0;
    const double rel_energy = proxy.energy.total_joules > 0.0 ? r.energy.total_joules / proxy.energy.total_joules : 0.0;
    out << std::left << std::setw(16) << hwsim::to_string(r.variant) << std::setw(8) << r.reduction_ratio
        << std::setw(12) << speedup << std::setw(12) << rel_energy;
    if (r.timeline.matching_cycles > 0) {
      out << r.timeline.hidden_matching_cycles << " / " << r.timeline.matching_cycles;
    } else {
      out << "-";
    }
    out << '\n';
  }
  out << "area " << area.total_mm2 << " mm2 per instance, DATM engine + QE share " << area.datm_plus_qe_fraction
      << '\n';
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  TrajectoryArgs traj;
  PipelineOptions opt;
  std::string ratios = "0.1,0.2,0.3,0.4,0.5,0.6,0.7";
  std::string matchers = "bsm,datm";
  std::string guidance = "output";
  std::string preset = "cogvideox-like";
  int rc_per_fc = 3;
};

double parse_ratio(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad ratio '" + s + "'");
}

void cmd_sweep(const Globals& g, SweepArgs a, const hwsim::HardwareConfig& cfg, std::ostream& out) {
  a.opt.guidance = parse_guidance(a.guidance);
  const Schedule sched = Schedule::standard(a.traj.wl.n_timesteps, a.rc_per_fc);
  const auto seeds = parse_seed_list(g.seeds);
  const hwsim::HwWorkload hw = hwsim::hw_preset(a.preset);
  const double full_step = static_cast<double>(hwsim::schedule_rc_step(hw, 0.0, cfg).critical_path_cycles);

  std::ostringstream csv;
  csv.precision(10);
  csv << "# orbis-csv v1 sweep\n"
      << "ratio,matcher,guidance,seed,mean_pair_loss,matching_quality,output_error,rc_step_speedup\n";
  for (const std::string& ratio_text : split_list(a.ratios)) {
    a.opt.reduction_ratio = parse_ratio(ratio_text);
    const double speedup =
        full_step / static_cast<double>(hwsim::schedule_rc_step(hw, a.opt.reduction_ratio, cfg).critical_path_cycles);
    for (const std::string& m : split_list(a.matchers)) {
      a.opt.matcher = parse_matcher(m);
      for (std::uint64_t seed : seeds) {
        a.traj.traj.seed = seed;
        a.opt.seed = seed;
        const RunResult res = run_pipeline(a.traj.traj, a.traj.wl, sched, a.opt);
        double loss = 0.0, quality = 0.0, error = 0.0, rc = 0.0;
        for (const StepRecord& r : res.records) {
          if (r.kind != StepKind::Reduced) continue;
          loss += r.mean_pair_loss;
          quality += r.matching_quality;
          error += r.output_error;
          rc += 1.0;
        }
        if (rc == 0.0) rc = 1.0;
        csv << a.opt.reduction_ratio << ',' << to_string(a.opt.matcher) << ',' << to_string(a.opt.guidance) << ','
            << seed << ',' << loss / rc << ',' << quality / rc << ',' << error / rc << ',' << speedup << '\n';
      }
    }
  }
  const fs::path path = prepare_out_dir(g) / "sweep.csv";
  write_text(path, csv);
  out << "csv=" << path.string() << '\n';
}

// Plain config keys fill flags the command line left unset.
void apply_flag_defaults(CLI::App& app, CLI::App* cmd, const ConfigFile& file) {
  for (const auto& [raw_key, value] : file.flag_defaults) {
    std::string key = raw_key;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      if (key.substr(0, dot) != cmd->get_name()) {
        if (app.get_subcommand_no_throw(key.substr(0, dot)) == nullptr) {
          throw std::invalid_argument("config key '" + raw_key + "' names no command");
        }
        continue;
      }
      key = key.substr(dot + 1);
    }
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      bool known = false;
      for (const CLI::App* other : app.get_subcommands({})) {
        known = known || other->get_option_no_throw("--" + key) != nullptr;
      }
      if (!known) throw std::invalid_argument("unknown config key '" + raw_key + "'");
      continue;
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Output-guided token reduction experiments and hardware model", "orbis"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "key = value file; hw.*, energy.*, area.* keys configure the simulator");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seeds, "seed list, e.g. 0-9 or 1,4,7")->capture_default_str();

  MatchArgs match;
  CLI::App* match_cmd = app.add_subcommand("match", "match one token matrix and write the pair file");
  match_cmd->add_option("--input", match.input, "ORBT token file; omit for a clustered fixture");
  match_cmd->add_option("--tokens", match.tokens, "fixture tokens")->capture_default_str();
  match_cmd->add_option("--channels", match.channels, "fixture channels")->capture_default_str();
  match_cmd->add_option("--clusters", match.clusters, "fixture clusters")->capture_default_str();
  match_cmd->add_option("--spread", match.spread, "fixture within-cluster spread (0 gives duplicates)")
      ->capture_default_str();
  add_matcher_options(match_cmd, match.opt, match.matcher);

  TrajectoryArgs sim_traj;
  CLI::App* sim_cmd = app.add_subcommand("similarity", "per-layer similarity-map correlations");
  add_trajectory_options(sim_cmd, sim_traj);

  PipelineArgs pipe;
  CLI::App* pipe_cmd = app.add_subcommand("pipeline", "FC/RC pipeline over a synthetic trajectory");
  add_trajectory_options(pipe_cmd, pipe.traj);
  add_matcher_options(pipe_cmd, pipe.opt, pipe.matcher);
  pipe_cmd->add_option("--guidance", pipe.guidance, "output or input")->capture_default_str();
  pipe_cmd->add_option("--rc-per-fc", pipe.rc_per_fc, "RC steps after each FC step")->capture_default_str();
  pipe_cmd->add_option("--schedule", pipe.schedule, "standard or full")->capture_default_str();

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "hardware speedup, energy and area");
  simulate_cmd->add_option("--preset", simulate.preset, "toy, cogvideox-like or hunyuan-like")->capture_default_str();
  simulate_cmd->add_option("--variants", simulate.variants, "comma-separated variants")->capture_default_str();
  simulate_cmd->add_option("--bsm-ratio", simulate.opt.bsm_ratio, "ratio for the ogm variant")->capture_default_str();
  simulate_cmd->add_option("--datm-ratio", simulate.opt.datm_ratio, "ratio for the DATM variants")
      ->capture_default_str();
  simulate_cmd->add_option("--rc-per-fc", simulate.rc_per_fc, "RC steps after each FC step")->capture_default_str();
  simulate_cmd->add_option("--timesteps", simulate.timesteps, "override the preset step count");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "matching quality and RC-step speedup across ratios");
  add_trajectory_options(sweep_cmd, sweep.traj);
  add_matcher_options(sweep_cmd, sweep.opt, sweep.matchers);
  sweep_cmd->get_option("--matcher")->description("comma-separated matchers");
  sweep_cmd->get_option("--ratio")->description("unused; see --ratios");
  sweep_cmd->add_option("--ratios", sweep.ratios, "comma-separated ratios")->capture_default_str();
  sweep_cmd->add_option("--guidance", sweep.guidance, "output or input")->capture_default_str();
  sweep_cmd->add_option("--preset", sweep.preset, "hardware preset for the RC-step speedup")->capture_default_str();
  sweep_cmd->add_option("--rc-per-fc", sweep.rc_per_fc, "RC steps after each FC step")->capture_default_str();

  std::vector<const char*> argv{"orbis"};
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitInvalid;
    }
    CLI::App* cmd = app.get_subcommands().front();
    hwsim::HardwareConfig hw;
    if (!g.config_path.empty()) {
      const ConfigFile file = load_config_file(g.config_path);
      apply_hardware(file, hw);
      try {
        apply_flag_defaults(app, cmd, file);
      } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
      }
    }
    hw.validate();
    if (cmd == match_cmd) cmd_match(g, match, out);
    if (cmd == sim_cmd) cmd_similarity(g, sim_traj, out);
    if (cmd == pipe_cmd) cmd_pipeline(g, pipe, out);
    if (cmd == simulate_cmd) cmd_simulate(g, simulate, hw, out);
    if (cmd == sweep_cmd) cmd_sweep(g, sweep, hw, out);
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "orbis: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "orbis: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "orbis: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace orbis::cli
