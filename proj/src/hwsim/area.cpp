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

#include "orbis/hwsim/area.hpp"

#include <stdexcept>

namespace orbis::hwsim {

double AreaReport::engine_mm2(std::string_view engine) const {
  double acc = 0.0;
  for (const AreaEntry& e : entries) {
    if (e.engine == engine) acc += e.mm2;
  }
  return acc;
}

AreaReport area_report(const HardwareConfig& cfg) {
  AreaReport r;
  auto add = [&](const char* engine, const char* unit, double count) {
    const auto it = cfg.area_table.find(unit);
    if (it == cfg.area_table.end()) {
      throw std::invalid_argument(std::string("area table has no entry '") + unit + "'");
    }
    r.entries.push_back({engine, unit, count, count * it->second});
  };
  add("dxe", "sa_pe", static_cast<double>(cfg.sa_rows * cfg.sa_cols));
  add("dxe", "vpu_lane", static_cast<double>(cfg.vpu_lanes));
  add("dxe", "global_mem_mb", cfg.global_mem_mb);
  add("dxe", "dxe_control", 1.0);
  // QE reuses the DXE vector unit; only its dividers and control are extra.
  add("qe", "qe_unit", 1.0);
  add("datm_engine", "dau_lane", static_cast<double>(cfg.dau_lanes));
  add("datm_engine", "min_tree_node", static_cast<double>(cfg.min_tree_width));
  add("datm_engine", "datm_vec_lane", static_cast<double>(cfg.datm_vec_lanes));
  add("datm_engine", "comparator", static_cast<double>(cfg.sorter_width / 2));
  add("datm_engine", "datm_buffer_kb", static_cast<double>(cfg.datm_buffer_kb));
  add("datm_engine", "datm_control", 1.0);

  for (const AreaEntry& e : r.entries) r.total_mm2 += e.mm2;
  if (r.total_mm2 > 0.0) {
    r.datm_plus_qe_fraction = (r.engine_mm2("qe") + r.engine_mm2("datm_engine")) / r.total_mm2;
  }
  return r;
}

}  // namespace orbis::hwsim
