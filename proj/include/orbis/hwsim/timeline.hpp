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
#include <vector>

#include "orbis/hwsim/workload.hpp"
#include "orbis/pipeline.hpp"

namespace orbis::hwsim {

struct EngineActivity {
  std::string engine;
  Cycles busy_cycles = 0;
  Cycles stall_cycles = 0;  // idle time between start and end
  Cycles start = 0;
  Cycles end = 0;
};

/// When a layer's matching input became available and when matching
/// actually started consuming it.
struct MatchingEvent {
  Index layer = 0;
  Cycles sdpa_output_ready = 0;
  Cycles matching_start = 0;
  Cycles matching_end = 0;
};

struct StepTimeline {
  Index timestep = 0;
  StepKind kind = StepKind::Full;
  MatchingMode matching = MatchingMode::None;
  std::vector<EngineActivity> engines;
  std::vector<MatchingEvent> events;
  Cycles dxe_cycles = 0;  // critical path of the DXE alone
  Cycles critical_path_cycles = 0;
  Cycles matching_cycles = 0;  // QE + matching work of the busiest instance
  Cycles hidden_matching_cycles = 0;

  bool fully_hidden() const { return critical_path_cycles == dxe_cycles; }
  const EngineActivity* engine(const std::string& name) const;
};

struct TimelineReport {
  std::vector<StepTimeline> steps;
  Cycles dxe_cycles = 0;
  Cycles critical_path_cycles = 0;
  Cycles matching_cycles = 0;
  Cycles hidden_matching_cycles = 0;

  void append(StepTimeline step);
};

/// Per-layer DXE ops repeated back to back for every layer.
std::vector<std::vector<Op>> step_ops(const HwWorkload& wl, const HardwareConfig& cfg, double ratio);

/// FC step: the DXE runs every layer at full length; after a layer's SDPA
/// output the selected matching work for that layer is released. Vector
/// unit matching and QE only use cycles the DXE leaves the vector unit idle;
/// the DATM engine takes each layer after its QE pass, first come first served.
StepTimeline schedule_fc_step(const HwWorkload& wl, MatchingMode mode, double ratio, const HardwareConfig& cfg);

/// RC step with SDPA shrunk by `ratio` and reduce/restore plus pair fetch
/// around it. No matching runs.
StepTimeline schedule_rc_step(const HwWorkload& wl, double ratio, const HardwareConfig& cfg);

}  // namespace orbis::hwsim
