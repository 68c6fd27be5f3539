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

#include "orbis/matching.hpp"
#include "orbis/tensor.hpp"

namespace orbis {

inline constexpr int kQuantMax = 7;

/// Signed 4-bit codes in [-7, 7] with one positive scale per channel.
struct QuantizedActivation {
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> codes;
  Eigen::VectorXd scales;

  Index n_tokens() const { return codes.rows(); }
  Index n_channels() const { return codes.cols(); }

  void validate() const;
};

/// scale_c = max_i |x(i, c)| / 7 (1 for an all-zero channel), codes are
/// x / scale rounded half away from zero and clamped to [-7, 7].
template <typename Derived>
QuantizedActivation quantize_channelwise(const Eigen::MatrixBase<Derived>& x) {
  validate_tokens(x, "quantize_channelwise");
  QuantizedActivation q;
  q.codes.resize(x.rows(), x.cols());
  q.scales.resize(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    double max_abs = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
      max_abs = std::max(max_abs, std::abs(static_cast<double>(x(i, c))));
    }
    const double scale = max_abs > 0.0 ? max_abs / kQuantMax : 1.0;
    q.scales(c) = scale;
    for (Index i = 0; i < x.rows(); ++i) {
      const double r = std::round(static_cast<double>(x(i, c)) / scale);
      q.codes(i, c) = static_cast<std::int8_t>(std::clamp(r, -double(kQuantMax), double(kQuantMax)));
    }
  }
  return q;
}

TokenMatrix dequantize(const QuantizedActivation& q);

/// Distance the DAU accumulates: the scale is applied to each code before
/// the difference, so the result is bit-identical to pairwise_l2 on
/// dequantize(q).
double quantized_sqdist(const QuantizedActivation& q, Index i, Index j);

/// DATM run on 4-bit codes. Pair losses are quantized distances.
DatmOutcome datm_match_quantized(const TokenMatrix& x, const DatmConfig& cfg);

}  // namespace orbis
