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

#include <string>
#include <string_view>
#include <vector>

#include "orbis/hwsim/timeline.hpp"

namespace orbis::hwsim {

enum class Variant {
  A100Proxy,
  Base,        // vanilla model, every step full
  Ogm,         // output-guided BSM on the vector unit
  OgmDatmNoHw, // output-guided full-precision DATM on the vector unit
  All,         // output-guided 4-bit DATM on QE + DATM engine
};

std::string to_string(Variant v);
/// Accepts the names printed by to_string; throws std::invalid_argument otherwise.
Variant parse_variant(std::string_view s);
std::vector<Variant> all_variants();

struct SimulateOptions {
  // Reduction ratios each matcher sustains at matched quality. The DATM
  // variants reach roughly 1.5x the BSM ratio.
  double bsm_ratio = 0.4;
  double datm_ratio = 0.6;

  double ratio_for(Variant v) const;
};

struct EnergyPart {
  std::string component;
  double joules = 0.0;
};

struct EnergyReport {
  std::vector<EnergyPart> parts;
  double total_joules = 0.0;
  double datm_plus_qe_fraction = 0.0;

  double part(std::string_view component) const;
};

struct RunReport {
  Variant variant = Variant::Base;
  double reduction_ratio = 0.0;
  TimelineReport timeline;  // empty steps for the proxy
  Cycles total_cycles = 0;
  double seconds = 0.0;
  EnergyReport energy;
};

/// Runs every step of `sched` for the variant. The proxy is a roofline over
/// the whole model at a100_efficiency of peak; its energy is time x power.
/// BASE ignores the FC/RC pattern and runs every step at full length.
RunReport simulate_run(const HwWorkload& wl, const Schedule& sched, Variant variant, const HardwareConfig& cfg,
                       const SimulateOptions& opt = {});

/// Seconds the proxy needs for one full-length step.
double a100_proxy_step_seconds(const HwWorkload& wl, const HardwareConfig& cfg);

}  // namespace orbis::hwsim
