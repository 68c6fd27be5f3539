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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "orbis/hwsim/config.hpp"

namespace orbis::cli {

/// "3", "1,2,7" or ranges such as "0-9" (inclusive), mixed freely.
/// Throws std::invalid_argument on anything else or an empty list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Parsed --config file. `hw.<field>`, `energy.<name>` and `area.<name>`
/// keys configure the simulator; every other key is a default for the
/// flag of the same name.
struct ConfigFile {
  std::map<std::string, std::string> hardware;
  std::map<std::string, std::string> flag_defaults;
};

ConfigFile load_config_file(const std::filesystem::path& path);

/// Applies the hardware keys in order. Unknown keys throw std::invalid_argument.
void apply_hardware(const ConfigFile& file, hwsim::HardwareConfig& cfg);

}  // namespace orbis::cli
