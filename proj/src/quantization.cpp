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

#include "orbis/quantization.hpp"

#include <stdexcept>

namespace orbis {

void QuantizedActivation::validate() const {
  if (codes.rows() < 1 || codes.cols() < 1) {
    throw std::invalid_argument("quantized activation: empty");
  }
  if (scales.size() != codes.cols()) {
    throw std::invalid_argument("quantized activation: one scale per channel required");
  }
  if ((codes.array().abs() > kQuantMax).any()) {
    throw std::invalid_argument("quantized activation: code outside [-7, 7]");
  }
  if (!(scales.array() > 0.0).all() || !scales.allFinite()) {
    throw std::invalid_argument("quantized activation: scales must be positive and finite");
  }
}

TokenMatrix dequantize(const QuantizedActivation& q) {
  TokenMatrix x(q.n_tokens(), q.n_channels());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index c = 0; c < x.cols(); ++c) {
      x(i, c) = static_cast<double>(q.codes(i, c)) * q.scales(c);
    }
  }
  return x;
}

double quantized_sqdist(const QuantizedActivation& q, Index i, Index j) {
  if (i < 0 || j < 0 || i >= q.n_tokens() || j >= q.n_tokens()) {
    throw std::out_of_range("quantized_sqdist: token index out of range");
  }
  double acc = 0.0;
  for (Index c = 0; c < q.n_channels(); ++c) {
    const double a = static_cast<double>(q.codes(i, c)) * q.scales(c);
    const double b = static_cast<double>(q.codes(j, c)) * q.scales(c);
    const double d = a - b;
    acc += d * d;
  }
  return acc;
}

DatmOutcome datm_match_quantized(const TokenMatrix& x, const DatmConfig& cfg) {
  return datm_match_detailed(dequantize(quantize_channelwise(x)), cfg);
}

}  // namespace orbis
