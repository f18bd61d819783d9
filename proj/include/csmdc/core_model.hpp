// Copyright 2026 The csmdc Authors.
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

#ifndef CSMDC_CORE_MODEL_HPP
#define CSMDC_CORE_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "csmdc/error.hpp"

namespace csmdc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Basis : std::uint8_t { identity = 0 };

struct GenConfig {
  Index n = 0;
  Index k = 0;
  double sigma_x2 = 1.0;
  std::uint64_t seed = 0;
};

/// k-sparse coefficient vector. With the identity basis the signal equals theta.
struct SparseSignal {
  Index n = 0;
  Index k = 0;
  std::vector<Index> support;  // strictly increasing
  Vector theta;
  Basis basis = Basis::identity;

  /// Signal in the sampling domain (x = Psi theta).
  const Vector& x() const { return theta; }

  /// Builds a signal from a dense coefficient vector; support is its nonzeros.
  static SparseSignal from_dense(const Vector& theta);
};

/// Gaussian sensing matrix, entries N(0, 1/m), fully determined by (m, n, seed).
struct SensingMatrix {
  Index m = 0;
  Index n = 0;
  std::uint64_t seed = 0;
  Matrix entries;

  /// Wraps explicit entries; used for hand-built test instances.
  static SensingMatrix from_entries(Matrix entries, std::uint64_t seed = 0);
};

struct Measurements {
  Vector y;
  std::uint64_t matrix_seed = 0;
  Index m = 0;
  Index n = 0;
};

SparseSignal gen_sparse_signal(const GenConfig& cfg);

SensingMatrix gen_sensing_matrix(Index m, Index n, std::uint64_t seed);

Measurements sense(const SensingMatrix& phi, const SparseSignal& x);

/// Mutual coherence: max |<a_i, a_j>| / (|a_i| |a_j|) over distinct columns.
template <typename Derived>
typename Derived::Scalar coherence(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.cols() < 2 || a.rows() < 1) {
    throw DimensionError("coherence needs at least one row and two columns");
  }
  const auto norms = a.colwise().norm().eval();
  if ((norms.array() == Scalar(0)).any()) {
    throw DegenerateError("coherence of a matrix with a zero column");
  }
  const auto gram = (a.transpose() * a).eval();
  Scalar mu(0);
  for (Index j = 1; j < gram.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      using std::abs;
      mu = std::max(mu, abs(gram(i, j)) / (norms(i) * norms(j)));
    }
  }
  return std::min(mu, Scalar(1));
}

inline double coherence(const SensingMatrix& phi) { return coherence(phi.entries); }

/// |x - x_hat|_2 / |x|_2.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar relative_distortion(const Eigen::MatrixBase<DerivedA>& x,
                                              const Eigen::MatrixBase<DerivedB>& x_hat) {
  if (x.size() != x_hat.size()) {
    throw DimensionError("relative_distortion: length mismatch");
  }
  const auto ref = x.norm();
  if (!(ref > 0)) {
    throw DegenerateError("relative_distortion: zero reference signal");
  }
  return (x - x_hat).norm() / ref;
}

}  // namespace csmdc

#endif  // CSMDC_CORE_MODEL_HPP
