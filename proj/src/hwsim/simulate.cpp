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

#include "orbis/hwsim/simulate.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace orbis::hwsim {

namespace {

constexpr double kPico = 1e-12;

double table_entry(const std::map<std::string, double>& table, const std::string& key) {
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("energy table has no entry '" + key + "'");
  return it->second;
}

// Energy accumulated in pJ per component, in a fixed order.
struct EnergyAccumulator {
  std::array<double, 7> pj{};
  static constexpr std::array<const char*, 7> kNames = {"dxe_sa", "dxe_vpu", "qe",  "datm_engine",
                                                        "vpu_matching", "dram", "sram"};

  EnergyReport finish() const {
    EnergyReport r;
    for (std::size_t i = 0; i < pj.size(); ++i) {
      r.parts.push_back({kNames[i], pj[i] * kPico});
      r.total_joules += pj[i] * kPico;
    }
    if (r.total_joules > 0.0) r.datm_plus_qe_fraction = (pj[2] + pj[3]) * kPico / r.total_joules;
    return r;
  }
};

void add_dxe_energy(EnergyAccumulator& acc, const std::vector<Op>& layer, const HwWorkload& wl,
                    const HardwareConfig& cfg) {
  const double copies = static_cast<double>(wl.model.n_layers * cfg.n_instances);
  const double mac = table_entry(cfg.energy_table, "sa_mac");
  const double vop = table_entry(cfg.energy_table, "vpu_op");
  const double sram = table_entry(cfg.energy_table, "sram_byte");
  for (const Op& op : layer) {
    acc.pj[0] += copies * static_cast<double>(op.macs) * mac;
    acc.pj[1] += copies * static_cast<double>(op.vector_ops) * vop;
    acc.pj[5] += copies * static_cast<double>(op.dram_bytes) * 8.0 * cfg.dram_pj_per_bit;
    acc.pj[6] += copies * static_cast<double>(op.sram_bytes) * sram;
  }
}

void add_matching_energy(EnergyAccumulator& acc, const HwWorkload& wl, MatchingMode mode, double ratio,
                         const HardwareConfig& cfg) {
  if (mode == MatchingMode::None) return;
  const double layers = static_cast<double>(wl.model.n_layers);
  const double vop = table_entry(cfg.energy_table, "vpu_op");
  const double dau = table_entry(cfg.energy_table, "dau_lane");
  const double node = table_entry(cfg.energy_table, "min_tree_node");
  const double vec = table_entry(cfg.energy_table, "datm_vec_op");
  const double cmp = table_entry(cfg.energy_table, "comparator");
  // Energy counts every group on every instance, not just the busiest one.
  for (std::int64_t g : match_groups(wl, cfg)) {
    const MatchingTask t = matching_task(g, wl.model.n_channels, ratio, mode, cfg);
    acc.pj[2] += layers * static_cast<double>(t.qe_cycles * cfg.vpu_lanes) * vop;
    acc.pj[3] += layers * (static_cast<double>(t.dau_cycles) *
                               (static_cast<double>(cfg.dau_lanes) * dau +
                                static_cast<double>(cfg.min_tree_width) * node) +
                           static_cast<double>(t.update_cycles * cfg.datm_vec_lanes) * vec +
                           static_cast<double>(t.sort_cycles * (cfg.sorter_width / 2)) * cmp);
    acc.pj[4] += layers * static_cast<double>(t.vpu_cycles * cfg.vpu_lanes) * vop;
    acc.pj[5] += layers * static_cast<double>(t.dram_bytes) * 8.0 * cfg.dram_pj_per_bit;
  }
}

MatchingMode mode_for(Variant v) {
  switch (v) {
    case Variant::Ogm: return MatchingMode::BsmOnVpu;
    case Variant::OgmDatmNoHw: return MatchingMode::DatmOnVpu;
    case Variant::All: return MatchingMode::DatmEngine;
    default: return MatchingMode::None;
  }
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::A100Proxy: return "a100-proxy";
    case Variant::Base: return "base";
    case Variant::Ogm: return "ogm";
    case Variant::OgmDatmNoHw: return "ogm-datm-nohw";
    case Variant::All: return "all";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : all_variants()) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (expected a100-proxy, base, ogm, ogm-datm-nohw or all)");
}

std::vector<Variant> all_variants() {
  return {Variant::A100Proxy, Variant::Base, Variant::Ogm, Variant::OgmDatmNoHw, Variant::All};
}

double SimulateOptions::ratio_for(Variant v) const {
  switch (v) {
    case Variant::Ogm: return bsm_ratio;
    case Variant::OgmDatmNoHw:
    case Variant::All: return datm_ratio;
    default: return 0.0;
  }
}

double EnergyReport::part(std::string_view component) const {
  for (const EnergyPart& p : parts) {
    if (p.component == component) return p.joules;
  }
  throw std::invalid_argument("energy report has no component '" + std::string(component) + "'");
}

double a100_proxy_step_seconds(const HwWorkload& wl, const HardwareConfig& cfg) {
  const auto N = static_cast<double>(wl.model.n_tokens);
  const auto D = static_cast<double>(wl.model.n_channels);
  const auto H = static_cast<double>(wl.model.n_heads);
  const auto F = static_cast<double>(wl.ffn_mult) * D;
  const double b = static_cast<double>(cfg.bytes_per_activation);
  const double macs = N * 3 * D * D + 2 * N * N * D + N * D * D + 2 * N * F * D;
  const double vector_flops = static_cast<double>(cfg.softmax_passes) * N * N * H + 8 * N * D + 2 * N * F;
  const double bytes = (4 * D * D + 2 * F * D) * b + (8 * N * D + 2 * N * F) * b;
  const double e = cfg.a100_efficiency;
  const double layer = std::max({2 * macs / (cfg.a100_tensor_tflops * 1e12 * e),
                                 vector_flops / (cfg.a100_vector_tflops * 1e12 * e),
                                 bytes / (cfg.a100_bandwidth_gbps * 1e9)});
  return layer * static_cast<double>(wl.model.n_layers);
}

RunReport simulate_run(const HwWorkload& wl, const Schedule& sched, Variant variant, const HardwareConfig& cfg,
                       const SimulateOptions& opt) {
  cfg.validate();
  wl.validate();
  sched.validate();
  RunReport out;
  out.variant = variant;
  out.reduction_ratio = opt.ratio_for(variant);
  if (out.reduction_ratio < 0.0 || out.reduction_ratio >= 1.0) {
    throw std::invalid_argument("simulate: reduction ratio must lie in [0, 1)");
  }
  const double cycle_seconds = 1e-9 / cfg.clock_ghz;

  if (variant == Variant::A100Proxy) {
    out.seconds = static_cast<double>(sched.steps.size()) * a100_proxy_step_seconds(wl, cfg);
    out.total_cycles = static_cast<Cycles>(out.seconds / cycle_seconds);
    out.energy.parts.push_back({"gpu", out.seconds * cfg.a100_power_w});
    out.energy.total_joules = out.energy.parts.back().joules;
    return out;
  }

  const MatchingMode mode = mode_for(variant);
  const StepTimeline fc = schedule_fc_step(wl, mode, out.reduction_ratio, cfg);
  const StepTimeline rc = schedule_rc_step(wl, out.reduction_ratio, cfg);
  const std::vector<Op> fc_layer = layer_ops(wl, cfg, 0.0);
  const std::vector<Op> rc_layer = layer_ops(wl, cfg, out.reduction_ratio);

  EnergyAccumulator acc;
  for (std::size_t t = 0; t < sched.steps.size(); ++t) {
    const bool full = variant == Variant::Base || sched.steps[t] == StepKind::Full;
    StepTimeline step = full ? fc : rc;
    step.timestep = static_cast<Index>(t);
    out.timeline.append(std::move(step));
    add_dxe_energy(acc, full ? fc_layer : rc_layer, wl, cfg);
    if (full) add_matching_energy(acc, wl, mode, out.reduction_ratio, cfg);
  }
  out.total_cycles = out.timeline.critical_path_cycles;
  out.seconds = static_cast<double>(out.total_cycles) * cycle_seconds;
  out.energy = acc.finish();
  return out;
}

}  // namespace orbis::hwsim
