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

#ifndef CSMDC_TESTS_LP_ORACLE_HPP
#define CSMDC_TESTS_LP_ORACLE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

/// Dense two-phase tableau simplex with Bland's rule for
///   minimize c^T z  subject to  M z = b,  z >= 0.
/// Small problems only. Returns nullopt when infeasible or unbounded.
struct LpSolution {
  std::vector<double> z;
  double objective = 0.0;
};

inline std::optional<LpSolution> simplex(std::vector<std::vector<double>> M, std::vector<double> b,
                                         const std::vector<double>& c) {
  const std::size_t rows = M.size();
  const std::size_t vars = c.size();
  const double tol = 1e-10;
  for (std::size_t i = 0; i < rows; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (auto& v : M[i]) v = -v;
    }
  }
  // Columns: original vars, one artificial per row, then the right-hand side.
  const std::size_t width = vars + rows + 1;
  std::vector<std::vector<double>> t(rows + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < vars; ++j) t[i][j] = M[i][j];
    t[i][vars + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = vars + i;
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double pv = t[r][col];
    for (auto& v : t[r]) v /= pv;
    for (std::size_t i = 0; i <= rows; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  // Objective row holds reduced costs; minimization ends when none is negative.
  auto run = [&](std::size_t allowed) -> bool {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = width;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (t[rows][j] < -tol) {
          enter = j;
          break;
        }
      }
      if (enter == width) return true;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        if (t[i][enter] > tol) {
          const double ratio = t[i][width - 1] / t[i][enter];
          if (ratio < best - tol || (std::abs(ratio - best) <= tol && leave < rows && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == rows) return false;  // unbounded
      pivot(leave, enter);
    }
    return false;
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < width; ++j) t[rows][j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < width; ++j) t[rows][j] -= t[i][j];
    t[rows][vars + i] = 0.0;
  }
  if (!run(vars + rows)) return std::nullopt;
  if (-t[rows][width - 1] > 1e-8) return std::nullopt;
  // Drive artificials out of the basis where possible.
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < vars) continue;
    for (std::size_t j = 0; j < vars; ++j) {
      if (std::abs(t[i][j]) > tol) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2.
  for (std::size_t j = 0; j < width; ++j) t[rows][j] = j < vars ? c[j] : 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < vars && c[basis[i]] != 0.0) {
      const double f = c[basis[i]];
      for (std::size_t j = 0; j < width; ++j) t[rows][j] -= f * t[i][j];
    }
  }
  if (!run(vars)) return std::nullopt;

  LpSolution sol;
  sol.z.assign(vars, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < vars) sol.z[basis[i]] = t[i][width - 1];
  }
  for (std::size_t j = 0; j < vars; ++j) sol.objective += c[j] * sol.z[j];
  return sol;
}

/// min |theta|_1 subject to A theta = y, via theta = u - w with u, w >= 0.
/// A is row-major, rows x n. Returns theta and the optimal l1 value.
struct L1Solution {
  std::vector<double> theta;
  double l1 = 0.0;
};

inline std::optional<L1Solution> l1_equality(const std::vector<std::vector<double>>& A,
                                             const std::vector<double>& y) {
  const std::size_t n = A.empty() ? 0 : A[0].size();
  std::vector<std::vector<double>> M(A.size(), std::vector<double>(2 * n));
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      M[i][j] = A[i][j];
      M[i][n + j] = -A[i][j];
    }
  }
  const auto lp = simplex(M, y, std::vector<double>(2 * n, 1.0));
  if (!lp) return std::nullopt;
  L1Solution out;
  out.theta.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.theta[j] = lp->z[j] - lp->z[n + j];
  out.l1 = lp->objective;
  return out;
}

}  // namespace oracle

#endif  // CSMDC_TESTS_LP_ORACLE_HPP
