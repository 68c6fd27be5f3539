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

#include "orbis/tensor.hpp"

namespace orbis {

double map_correlation(const SimilarityMap& a, const SimilarityMap& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw std::invalid_argument("map_correlation: map size mismatch");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  const auto& va = a.values;
  const auto& vb = b.values;
  for (Index j = 0; j < va.cols(); ++j) {
    for (Index i = 0; i < va.rows(); ++i) {
      dot += va(i, j) * vb(i, j);
      na += va(i, j) * va(i, j);
      nb += vb(i, j) * vb(i, j);
    }
  }
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace orbis
