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

#include <iosfwd>
#include <string_view>
#include <vector>

#include "orbis/hwsim/area.hpp"
#include "orbis/hwsim/simulate.hpp"

namespace orbis::hwsim {

inline constexpr std::string_view kSimulateCsvHeader =
    "workload,variant,reduction_ratio,total_cycles,seconds,speedup,energy_j,normalized_energy,matching_cycles,"
    "hidden_matching_cycles";
inline constexpr std::string_view kEnergyCsvHeader = "workload,variant,component,joules,share";
inline constexpr std::string_view kAreaCsvHeader = "engine,unit,count,mm2,share";
inline constexpr std::string_view kTimelineCsvHeader =
    "workload,variant,timestep,step_kind,engine,busy_cycles,stall_cycles,start,end";

/// One row per report; speedup and energy are normalised to `proxy`.
void write_simulate_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs,
                        const RunReport& proxy);
void write_energy_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs);
/// Area rows followed by per-engine subtotals and a total row.
void write_area_csv(std::ostream& out, const AreaReport& area);
/// Engine activity of the first FC and first RC step of each run.
void write_timeline_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs);

}  // namespace orbis::hwsim
