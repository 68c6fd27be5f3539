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

#include "orbis/hwsim/report.hpp"

#include <ostream>

namespace orbis::hwsim {

namespace {

void set_precision(std::ostream& out) { out.precision(10); }

}  // namespace

void write_simulate_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs,
                        const RunReport& proxy) {
  set_precision(out);
  out << "# orbis-csv v1 simulate\n" << kSimulateCsvHeader << '\n';
  for (const RunReport& r : runs) {
    const double speedup = r.seconds > 0.0 ? proxy.seconds / r.seconds : 0.0;
    const double energy = proxy.energy.total_joules > 0.0 ? r.energy.total_joules / proxy.energy.total_joules : 0.0;
    out << workload << ',' << to_string(r.variant) << ',' << r.reduction_ratio << ',' << r.total_cycles << ','
        << r.seconds << ',' << speedup << ',' << r.energy.total_joules << ',' << energy << ','
        << r.timeline.matching_cycles << ',' << r.timeline.hidden_matching_cycles << '\n';
  }
}

void write_energy_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs) {
  set_precision(out);
  out << "# orbis-csv v1 energy\n" << kEnergyCsvHeader << '\n';
  for (const RunReport& r : runs) {
    for (const EnergyPart& p : r.energy.parts) {
      const double share = r.energy.total_joules > 0.0 ? p.joules / r.energy.total_joules : 0.0;
      out << workload << ',' << to_string(r.variant) << ',' << p.component << ',' << p.joules << ',' << share << '\n';
    }
    out << workload << ',' << to_string(r.variant) << ",total," << r.energy.total_joules << ",1\n";
  }
}

void write_area_csv(std::ostream& out, const AreaReport& area) {
  set_precision(out);
  out << "# orbis-csv v1 area\n" << kAreaCsvHeader << '\n';
  auto share = [&](double mm2) { return area.total_mm2 > 0.0 ? mm2 / area.total_mm2 : 0.0; };
  for (const AreaEntry& e : area.entries) {
    out << e.engine << ',' << e.unit << ',' << e.count << ',' << e.mm2 << ',' << share(e.mm2) << '\n';
  }
  for (const char* engine : {"dxe", "qe", "datm_engine"}) {
    const double mm2 = area.engine_mm2(engine);
    out << engine << ",subtotal,," << mm2 << ',' << share(mm2) << '\n';
  }
  out << "total,total,," << area.total_mm2 << ",1\n";
}

void write_timeline_csv(std::ostream& out, std::string_view workload, const std::vector<RunReport>& runs) {
  out << "# orbis-csv v1 timeline\n" << kTimelineCsvHeader << '\n';
  for (const RunReport& r : runs) {
    bool seen_fc = false;
    bool seen_rc = false;
    for (const StepTimeline& st : r.timeline.steps) {
      bool& seen = st.kind == StepKind::Full ? seen_fc : seen_rc;
      if (seen) continue;
      seen = true;
      for (const EngineActivity& a : st.engines) {
        out << workload << ',' << to_string(r.variant) << ',' << st.timestep << ',' << to_string(st.kind) << ','
            << a.engine << ',' << a.busy_cycles << ',' << a.stall_cycles << ',' << a.start << ',' << a.end << '\n';
      }
    }
  }
}

}  // namespace orbis::hwsim
