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

#include "csmdc/core_model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "csmdc/random.hpp"

namespace csmdc {

SparseSignal SparseSignal::from_dense(const Vector& theta) {
  SparseSignal s;
  s.n = theta.size();
  s.theta = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    if (theta(i) != 0.0) s.support.push_back(i);
  }
  s.k = static_cast<Index>(s.support.size());
  return s;
}

SensingMatrix SensingMatrix::from_entries(Matrix entries, std::uint64_t seed) {
  SensingMatrix phi;
  phi.m = entries.rows();
  phi.n = entries.cols();
  phi.seed = seed;
  phi.entries = std::move(entries);
  return phi;
}

SparseSignal gen_sparse_signal(const GenConfig& cfg) {
  if (cfg.n < 1 || cfg.k < 0 || cfg.k > cfg.n) {
    throw ConfigError("gen_sparse_signal: need 0 <= k <= n and n >= 1 (n=" +
                      std::to_string(cfg.n) + ", k=" + std::to_string(cfg.k) + ")");
  }
  if (!(cfg.sigma_x2 > 0.0) || !std::isfinite(cfg.sigma_x2)) {
    throw ConfigError("gen_sparse_signal: sigma_x2 must be positive");
  }
  Rng rng(cfg.seed);

  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  std::vector<Index> perm(static_cast<std::size_t>(cfg.n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < cfg.k; ++i) {
    const auto j = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(cfg.n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  SparseSignal s;
  s.n = cfg.n;
  s.k = cfg.k;
  s.support.assign(perm.begin(), perm.begin() + cfg.k);
  std::sort(s.support.begin(), s.support.end());
  s.theta = Vector::Zero(cfg.n);
  const double sigma = std::sqrt(cfg.sigma_x2);
  for (Index idx : s.support) {
    double v = 0.0;
    // A Gaussian draw of exactly zero would silently shrink the support.
    while (v == 0.0) v = sigma * rng.normal();
    s.theta(idx) = v;
  }
  return s;
}

SensingMatrix gen_sensing_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw ConfigError("gen_sensing_matrix: m and n must be positive");
  }
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  SensingMatrix phi;
  phi.m = m;
  phi.n = n;
  phi.seed = seed;
  phi.entries.resize(m, n);
  // Row-major draw order: the raw normal draws of row i do not depend on m.
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) phi.entries(i, j) = sd * rng.normal();
  }
  return phi;
}

Measurements sense(const SensingMatrix& phi, const SparseSignal& x) {
  if (phi.n != x.n || x.theta.size() != phi.entries.cols()) {
    throw DimensionError("sense: matrix has " + std::to_string(phi.n) +
                         " columns, signal has length " + std::to_string(x.n));
  }
  Measurements out;
  out.y = phi.entries * x.x();
  out.matrix_seed = phi.seed;
  out.m = phi.m;
  out.n = phi.n;
  return out;
}

}  // namespace csmdc
