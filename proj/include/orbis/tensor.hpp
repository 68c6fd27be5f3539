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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbis {

using Index = Eigen::Index;

/// N x D activation, one token per row. Stored row-major so a token is a
/// contiguous span of channels.
template <typename Scalar>
using TokenMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using TokenMatrix = TokenMatrixT<double>;
using TokenMatrixF = TokenMatrixT<float>;

/// Dense real matrix used for similarity maps and distance tables.
using DistanceMatrix = Eigen::MatrixXd;

/// Inter-token cosine similarity map (n x n, symmetric, entries in [-1, 1]).
struct SimilarityMap {
  Eigen::MatrixXd values;

  Index size() const { return values.rows(); }
};

/// Throws std::invalid_argument unless x is non-empty and finite.
template <typename Derived>
void validate_tokens(const Eigen::MatrixBase<Derived>& x, const char* what = "token matrix") {
  if (x.rows() < 1 || x.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": needs at least one token and one channel");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": contains non-finite values");
  }
}

// Accumulation is always in double, whatever the input scalar is.

template <typename Derived>
SimilarityMap cosine_similarity_map(const Eigen::MatrixBase<Derived>& x) {
  const TokenMatrix xd = x.template cast<double>();
  const Index n = xd.rows();
  Eigen::VectorXd inv_norm(n);
  for (Index i = 0; i < n; ++i) {
    const double norm = xd.row(i).norm();
    inv_norm(i) = norm > 0.0 ? 1.0 / norm : 0.0;
  }
  SimilarityMap out;
  out.values = (xd * xd.transpose()).eval();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out.values(i, j) *= inv_norm(i) * inv_norm(j);
    }
  }
  // Symmetrize and pin the diagonal so the map invariants hold exactly.
  for (Index i = 0; i < n; ++i) {
    out.values(i, i) = inv_norm(i) > 0.0 ? 1.0 : 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(out.values(i, j), -1.0, 1.0);
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

/// Cosine similarity of two maps flattened to vectors. Zero maps give 0.
double map_correlation(const SimilarityMap& a, const SimilarityMap& b);

/// Squared L2 distance between token rows, channels accumulated in
/// ascending order. Entry (i, j) compares a.row(i) with b.row(j).
template <typename DerivedA, typename DerivedB>
DistanceMatrix pairwise_l2(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("pairwise_l2: channel count mismatch");
  }
  DistanceMatrix out(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (Index c = 0; c < a.cols(); ++c) {
        const double d = static_cast<double>(a(i, c)) - static_cast<double>(b(j, c));
        acc += d * d;
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Squared L2 between two rows of the same matrix, ascending channel order.
template <typename Derived>
double row_sqdist(const Eigen::MatrixBase<Derived>& x, Index i, Index j) {
  double acc = 0.0;
  for (Index c = 0; c < x.cols(); ++c) {
    const double d = static_cast<double>(x(i, c)) - static_cast<double>(x(j, c));
    acc += d * d;
  }
  return acc;
}

}  // namespace orbis
