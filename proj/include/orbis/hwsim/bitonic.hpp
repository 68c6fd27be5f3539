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
#include <span>
#include <vector>

#include "orbis/matching.hpp"

namespace orbis::hwsim {

struct Comparator {
  std::int64_t lo = 0;  // receives the smaller key when ascending
  std::int64_t hi = 0;
  bool ascending = true;
};

/// Batcher's bitonic sorting network for a power-of-two width, one entry per
/// stage. Every stage holds width / 2 independent comparators.
struct BitonicNetwork {
  std::int64_t width = 0;
  std::vector<std::vector<Comparator>> stages;

  static BitonicNetwork build(std::int64_t width);

  std::int64_t comparator_count() const;

  /// Applies the network in place; `keys.size()` must equal width.
  template <typename T, typename Less>
  void apply(std::span<T> keys, Less less) const {
    for (const auto& stage : stages) {
      for (const Comparator& c : stage) {
        T& a = keys[static_cast<std::size_t>(c.lo)];
        T& b = keys[static_cast<std::size_t>(c.hi)];
        if (c.ascending == less(b, a)) std::swap(a, b);
      }
    }
  }
};

/// Ascending sort through the network; the input is padded with +inf.
std::vector<double> bitonic_sort(std::span<const double> values);

/// The top-k selection the DATM engine performs: sort (loss, src) through
/// the network and keep the first k.
std::vector<TokenPair> bitonic_top_k(std::span<const TokenPair> candidates, std::int64_t k);

}  // namespace orbis::hwsim
