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

#include "orbis/hwsim/bitonic.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace orbis::hwsim {

namespace {

std::int64_t next_pow2(std::int64_t n) {
  std::int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

BitonicNetwork BitonicNetwork::build(std::int64_t width) {
  if (width < 2 || (width & (width - 1)) != 0) {
    throw std::invalid_argument("bitonic network width must be a power of two >= 2");
  }
  BitonicNetwork net;
  net.width = width;
  for (std::int64_t block = 2; block <= width; block <<= 1) {
    for (std::int64_t stride = block >> 1; stride > 0; stride >>= 1) {
      std::vector<Comparator> stage;
      stage.reserve(static_cast<std::size_t>(width / 2));
      for (std::int64_t i = 0; i < width; ++i) {
        const std::int64_t partner = i ^ stride;
        if (partner > i) stage.push_back({i, partner, (i & block) == 0});
      }
      net.stages.push_back(std::move(stage));
    }
  }
  return net;
}

std::int64_t BitonicNetwork::comparator_count() const {
  std::int64_t n = 0;
  for (const auto& s : stages) n += static_cast<std::int64_t>(s.size());
  return n;
}

std::vector<double> bitonic_sort(std::span<const double> values) {
  if (values.size() < 2) return {values.begin(), values.end()};
  const auto width = next_pow2(static_cast<std::int64_t>(values.size()));
  std::vector<double> keys(values.begin(), values.end());
  keys.resize(static_cast<std::size_t>(width), std::numeric_limits<double>::infinity());
  BitonicNetwork::build(width).apply(std::span<double>(keys), std::less<double>());
  keys.resize(values.size());
  return keys;
}

std::vector<TokenPair> bitonic_top_k(std::span<const TokenPair> candidates, std::int64_t k) {
  if (k <= 0 || candidates.empty()) return {};
  std::vector<TokenPair> keys(candidates.begin(), candidates.end());
  if (keys.size() >= 2) {
    const auto width = next_pow2(static_cast<std::int64_t>(keys.size()));
    keys.resize(static_cast<std::size_t>(width),
                TokenPair{std::numeric_limits<Index>::max(), 0, std::numeric_limits<double>::infinity()});
    auto less = [](const TokenPair& a, const TokenPair& b) {
      return a.loss != b.loss ? a.loss < b.loss : a.src < b.src;
    };
    BitonicNetwork::build(width).apply(std::span<TokenPair>(keys), less);
    keys.resize(candidates.size());
  }
  if (static_cast<std::size_t>(k) < keys.size()) keys.resize(static_cast<std::size_t>(k));
  std::sort(keys.begin(), keys.end(), [](const TokenPair& a, const TokenPair& b) { return a.src < b.src; });
  return keys;
}

}  // namespace orbis::hwsim
