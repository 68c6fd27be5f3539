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

#include "orbis/hwsim/config.hpp"

namespace orbis::hwsim {

struct AreaEntry {
  std::string engine;  // "dxe", "qe" or "datm_engine"
  std::string unit;    // area_table key
  double count = 0.0;
  double mm2 = 0.0;
};

/// Area of one instance.
struct AreaReport {
  std::vector<AreaEntry> entries;
  double total_mm2 = 0.0;
  double datm_plus_qe_fraction = 0.0;

  double engine_mm2(std::string_view engine) const;
};

/// Unit counts from the config times area_table entries. A missing table
/// entry throws std::invalid_argument.
AreaReport area_report(const HardwareConfig& cfg);

}  // namespace orbis::hwsim
