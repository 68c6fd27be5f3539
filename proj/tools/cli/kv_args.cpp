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

#include "cli/kv_args.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace orbis::cli {

namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad seed '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse_u64(item));
      continue;
    }
    const std::uint64_t lo = parse_u64(item.substr(0, dash));
    const std::uint64_t hi = parse_u64(item.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("seed range '" + item + "' runs backwards");
    if (hi - lo >= 1'000'000) throw std::invalid_argument("seed range '" + item + "' is too long");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  return seeds;
}

ConfigFile load_config_file(const std::filesystem::path& path) {
  ConfigFile file;
  for (auto& [key, value] : hwsim::parse_key_value_file(path)) {
    if (key.rfind("hw.", 0) == 0) {
      file.hardware[key.substr(3)] = value;
    } else if (key.rfind("energy.", 0) == 0 || key.rfind("area.", 0) == 0) {
      file.hardware[key] = value;
    } else {
      file.flag_defaults[key] = value;
    }
  }
  return file;
}

void apply_hardware(const ConfigFile& file, hwsim::HardwareConfig& cfg) {
  for (const auto& [key, value] : file.hardware) cfg.set(key, value);
  cfg.validate();
}

}  // namespace orbis::cli
