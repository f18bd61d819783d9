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

#ifndef CSMDC_SOLVERS_HPP
#define CSMDC_SOLVERS_HPP

// l1 recovery under l2-ball and l-infinity-box constraints on the residual.
//
// Both problems solved here have the form
//
//   minimize |theta|_1  subject to  A theta in C,
//
// where C is a product, over row blocks of A, of the intersection of an l2
// ball and an axis-aligned box, both centered on the block's measurements.
// The solver is ADMM on the splitting u = theta, v = A theta:
//
//   theta <- (I + A^T A)^{-1} ((u - w_u) + A^T (v - w_v))
//   u     <- soft_threshold(theta + w_u, 1 / rho)
//   v     <- P_C(A theta + w_v)
//
// with over-relaxation and residual balancing of rho. The projection onto
// ball-intersect-box is exact: clip(t d) with the scalar t found in closed
// form over the sorted breakpoints. The linear system is factored once, on
// the smaller of its two Woodbury forms.
//
// A final polishing step moves A theta onto P_C(A theta) with the minimum-norm
// correction, which makes the returned point feasible to round-off whenever A
// has full row rank.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csmdc/core_model.hpp"
#include "csmdc/error.hpp"

namespace csmdc {

struct SolverOptions {
  int max_iters = 5000;
  double abs_tol = 1e-6;
  double rel_tol = 1e-4;
  double penalty = 1.0;  // initial ADMM penalty rho; also weights the merit
  double feasibility_slack = 1e-3;
  double over_relaxation = 1.6;
  bool adaptive_penalty = true;
  bool record_trajectory = false;
};

enum class SolverStatus { converged, iteration_limit, infeasible };

inline const char* to_string(SolverStatus s) noexcept;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct SolverResult {
  VectorX<Scalar> theta_hat;
  int iterations = 0;
  bool converged = false;
  SolverStatus status = SolverStatus::iteration_limit;
  /// Measured value of each constraint at theta_hat, paired with its bound.
  std::vector<Scalar> constraint_residuals;
  std::vector<Scalar> constraint_bounds;
  /// Set when an infeasible box intersection forced a re-solve without boxes.
  bool boxes_dropped = false;
  /// |u|_1 + penalty * dist(A u, C) per iteration (record_trajectory only).
  std::vector<Scalar> merit_trajectory;

  Scalar l1() const { return theta_hat.template lpNorm<1>(); }
};

/// minimize |theta|_1 s.t. |y - A theta|_2 <= epsilon.
template <typename Scalar>
struct BpdnProblem {
  MatrixX<Scalar> A;
  VectorX<Scalar> y;
  Scalar epsilon = 0;
};

/// One measurement group of the side-decoding problem.
template <typename Scalar>
struct QuantizedGroup {
  MatrixX<Scalar> A;
  VectorX<Scalar> y;
  Scalar epsilon = 0;
  Scalar delta = std::numeric_limits<Scalar>::infinity();  // box half-width is delta / 2
};

/// minimize |theta|_1 subject to an l2 ball and an l-infinity box per group.
template <typename Scalar>
struct GqSideProblem {
  QuantizedGroup<Scalar> group1;
  QuantizedGroup<Scalar> group2;
};

/// Residual bound from the uniform quantization noise model: the RMS norm of
/// `count` i.i.d. errors uniform on a cell of width delta, times kappa.
inline double default_epsilon(double delta, Index count, double kappa = 1.0) {
  if (!(delta > 0.0)) throw ConfigError("default_epsilon: delta must be positive");
  if (count < 0) throw ConfigError("default_epsilon: negative count");
  return kappa * delta * std::sqrt(static_cast<double>(count) / 12.0);
}

/// Rows [offset, offset + count) of the stacked system and their constraints.
template <typename Scalar>
struct ConstraintBlock {
  Index offset = 0;
  Index count = 0;
  Scalar radius = std::numeric_limits<Scalar>::infinity();
  Scalar half_width = std::numeric_limits<Scalar>::infinity();
};

namespace detail {

// Residual balancing runs only over the first iterations; rescaling rho
// indefinitely can keep ADMM from settling.
inline constexpr int kPenaltyAdaptWindow = 500;

/// In place: d <- argmin |z - d| over {|z|_2 <= r, |z|_inf <= h}.
/// The answer is clip(t d, h) for the t in (0, 1] that puts it on the sphere.
template <typename Scalar>
void project_ball_box(VectorX<Scalar>& d, Scalar r, Scalar h, std::vector<Scalar>& scratch) {
  using std::sqrt;
  const bool has_box = std::isfinite(static_cast<double>(h));
  const bool has_ball = std::isfinite(static_cast<double>(r));
  if (!has_ball) {
    if (has_box) d = d.cwiseMax(-h).cwiseMin(h);
    return;
  }
  const Scalar clipped_norm = has_box ? d.cwiseMax(-h).cwiseMin(h).norm() : d.norm();
  if (clipped_norm <= r) {
    if (has_box) d = d.cwiseMax(-h).cwiseMin(h);
    return;
  }
  if (r <= Scalar(0)) {
    d.setZero();
    return;
  }
  if (!has_box) {
    d *= r / d.norm();
    return;
  }
  // With the j largest |d_i| clipped, |clip(t d)|^2 = j h^2 + t^2 tail_j.
  scratch.resize(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) scratch[static_cast<std::size_t>(i)] = std::abs(d(i));
  std::sort(scratch.begin(), scratch.end(), std::greater<Scalar>());
  Scalar tail = 0;
  for (Scalar a : scratch) tail += a * a;
  Scalar t = r / d.norm();
  for (std::size_t j = 0; j < scratch.size(); ++j) {
    const Scalar budget = r * r - static_cast<Scalar>(j) * h * h;
    if (budget <= 0 || tail <= 0) break;
    const Scalar cand = sqrt(budget / tail);
    if (cand * scratch[j] < h && (j == 0 || cand * scratch[j - 1] >= h)) {
      t = cand;
      break;
    }
    tail -= scratch[j] * scratch[j];
  }
  d = (t * d).cwiseMax(-h).cwiseMin(h);
}

template <typename Scalar>
VectorX<Scalar> project_onto(const VectorX<Scalar>& z, const VectorX<Scalar>& y,
                             const std::vector<ConstraintBlock<Scalar>>& blocks,
                             std::vector<Scalar>& scratch) {
  VectorX<Scalar> out = z;
  for (const auto& b : blocks) {
    auto seg = out.segment(b.offset, b.count);
    VectorX<Scalar> d = seg - y.segment(b.offset, b.count);
    project_ball_box(d, b.radius, b.half_width, scratch);
    seg = y.segment(b.offset, b.count) + d;
  }
  return out;
}

template <typename Scalar>
VectorX<Scalar> soft_threshold(const VectorX<Scalar>& x, Scalar kappa) {
  return x.unaryExpr([kappa](Scalar v) {
    return v > kappa ? v - kappa : (v < -kappa ? v + kappa : Scalar(0));
  });
}

/// Applies (I + A^T A)^{-1} using whichever Cholesky factor is smaller.
template <typename Scalar>
class RegularizedNormalSolver {
 public:
  explicit RegularizedNormalSolver(const MatrixX<Scalar>& a) : a_(a) {
    wide_ = a.rows() <= a.cols();
    if (wide_) {
      MatrixX<Scalar> k = a * a.transpose();
      k.diagonal().array() += Scalar(1);
      llt_.compute(k);
    } else {
      MatrixX<Scalar> k = a.transpose() * a;
      k.diagonal().array() += Scalar(1);
      llt_.compute(k);
    }
  }

  VectorX<Scalar> solve(const VectorX<Scalar>& r) const {
    if (!wide_) return llt_.solve(r);
    // Woodbury: (I + A^T A)^{-1} = I - A^T (I + A A^T)^{-1} A.
    return r - a_.transpose() * llt_.solve(a_ * r);
  }

 private:
  const MatrixX<Scalar>& a_;
  bool wide_ = true;
  Eigen::LLT<MatrixX<Scalar>> llt_;
};

template <typename Scalar>
SolverResult<Scalar> admm_l1(const MatrixX<Scalar>& a, const VectorX<Scalar>& y,
                             const std::vector<ConstraintBlock<Scalar>>& blocks,
                             const SolverOptions& opts) {
  using std::sqrt;
  const Index n = a.cols();
  const Index m = a.rows();
  SolverResult<Scalar> res;

  std::vector<Scalar> scratch;
  const RegularizedNormalSolver<Scalar> normal(a);
  const Scalar alpha = static_cast<Scalar>(opts.over_relaxation);
  const Scalar abs_tol = static_cast<Scalar>(opts.abs_tol);
  const Scalar rel_tol = static_cast<Scalar>(opts.rel_tol);
  Scalar rho = static_cast<Scalar>(opts.penalty);

  VectorX<Scalar> theta = VectorX<Scalar>::Zero(n);
  VectorX<Scalar> u = VectorX<Scalar>::Zero(n);
  VectorX<Scalar> v = project_onto<Scalar>(VectorX<Scalar>::Zero(m), y, blocks, scratch);
  VectorX<Scalar> wu = VectorX<Scalar>::Zero(n);
  VectorX<Scalar> wv = VectorX<Scalar>::Zero(m);
  VectorX<Scalar> a_theta(m);

  Scalar r_norm = std::numeric_limits<Scalar>::infinity();
  Scalar r_half = r_norm;
  Scalar eps_pri = 0;
  bool tolerances_met = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    theta = normal.solve((u - wu) + a.transpose() * (v - wv));
    a_theta.noalias() = a * theta;

    const VectorX<Scalar> hu = alpha * theta + (Scalar(1) - alpha) * u;
    const VectorX<Scalar> hv = alpha * a_theta + (Scalar(1) - alpha) * v;
    const VectorX<Scalar> u_old = u;
    const VectorX<Scalar> v_old = v;
    u = soft_threshold<Scalar>(hu + wu, Scalar(1) / rho);
    v = project_onto<Scalar>(hv + wv, y, blocks, scratch);
    wu += hu - u;
    wv += hv - v;

    r_norm = sqrt((theta - u).squaredNorm() + (a_theta - v).squaredNorm());
    const Scalar s_norm = rho * ((u - u_old) + a.transpose() * (v - v_old)).norm();
    eps_pri = sqrt(static_cast<Scalar>(n + m)) * abs_tol +
              rel_tol * std::max(sqrt(theta.squaredNorm() + a_theta.squaredNorm()),
                                 sqrt(u.squaredNorm() + v.squaredNorm()));
    const Scalar eps_dual = sqrt(static_cast<Scalar>(n)) * abs_tol +
                            rel_tol * rho * (wu + a.transpose() * wv).norm();

    if (opts.record_trajectory) {
      const VectorX<Scalar> au = a * u;
      const Scalar infeas = (au - project_onto<Scalar>(au, y, blocks, scratch)).norm();
      res.merit_trajectory.push_back(u.template lpNorm<1>() +
                                     static_cast<Scalar>(opts.penalty) * infeas);
    }
    if (it == opts.max_iters / 2) r_half = r_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      tolerances_met = true;
      ++it;
      break;
    }
    if (opts.adaptive_penalty && it % 10 == 9 && it < kPenaltyAdaptWindow) {
      Scalar factor = 1;
      if (r_norm > Scalar(10) * s_norm) factor = 2;
      else if (s_norm > Scalar(10) * r_norm) factor = Scalar(0.5);
      if (factor != Scalar(1)) {
        rho *= factor;
        wu /= factor;
        wv /= factor;
      }
    }
  }
  res.iterations = it;

  // Polish: minimum-norm step that lands A theta on its projection onto C.
  a_theta.noalias() = a * theta;
  const VectorX<Scalar> target = project_onto<Scalar>(a_theta, y, blocks, scratch);
  const VectorX<Scalar> gap = target - a_theta;
  if (gap.norm() > Scalar(0)) {
    Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(a);
    theta += cod.solve(gap);
  }
  res.status = tolerances_met ? SolverStatus::converged : SolverStatus::iteration_limit;
  if (!tolerances_met) {
    // Infeasible when even the polished point stays away from C and the
    // iterates stopped making progress on the primal residual.
    a_theta.noalias() = a * theta;
    const Scalar miss = (a_theta - project_onto<Scalar>(a_theta, y, blocks, scratch)).norm();
    const Scalar floor = sqrt(static_cast<Scalar>(m)) * abs_tol + rel_tol * y.norm();
    if (miss > floor && r_norm > Scalar(0.5) * r_half) res.status = SolverStatus::infeasible;
  }
  res.theta_hat = std::move(theta);
  return res;
}

/// Stacks measured residual values and their bounds for each block:
/// (l2, bound), then (l-inf, bound) when `with_box`.
template <typename Scalar>
void fill_residuals(SolverResult<Scalar>& res, const MatrixX<Scalar>& a, const VectorX<Scalar>& y,
                    const std::vector<ConstraintBlock<Scalar>>& blocks, bool with_box,
                    Scalar slack) {
  const VectorX<Scalar> r = y - a * res.theta_hat;
  res.constraint_residuals.clear();
  res.constraint_bounds.clear();
  bool feasible = true;
  auto push = [&](Scalar value, Scalar bound) {
    res.constraint_residuals.push_back(value);
    res.constraint_bounds.push_back(bound);
    // Absolute floor keeps a zero bound (epsilon = 0) satisfiable in floating point.
    const Scalar floor = Scalar(1e-9) * (Scalar(1) + y.norm());
    if (value > bound * (Scalar(1) + slack) + floor) feasible = false;
  };
  for (const auto& b : blocks) {
    const auto seg = r.segment(b.offset, b.count);
    push(b.count > 0 ? seg.norm() : Scalar(0), b.radius);
    if (with_box) push(b.count > 0 ? seg.template lpNorm<Eigen::Infinity>() : Scalar(0), b.half_width);
  }
  if (res.status == SolverStatus::converged && !feasible) res.status = SolverStatus::iteration_limit;
  res.converged = res.status == SolverStatus::converged;
}

template <typename Scalar>
void check_inputs(const MatrixX<Scalar>& a, const VectorX<Scalar>& y, Scalar eps) {
  if (a.rows() != y.size()) throw DimensionError("solver: rows(A) != length(y)");
  if (!a.allFinite() || !y.allFinite()) throw ConfigError("solver: NaN or Inf in problem data");
  if (!(eps >= Scalar(0))) throw ConfigError("solver: epsilon must be >= 0");
}

}  // namespace detail

template <typename Scalar>
SolverResult<Scalar> bpdn(const BpdnProblem<Scalar>& p, const SolverOptions& opts = {}) {
  detail::check_inputs(p.A, p.y, p.epsilon);
  if (p.A.rows() == 0 || p.A.cols() == 0) throw DimensionError("bpdn: empty sensing matrix");
  if (!std::isfinite(static_cast<double>(p.epsilon))) throw ConfigError("bpdn: epsilon must be finite");
  std::vector<ConstraintBlock<Scalar>> blocks{{0, p.A.rows(), p.epsilon}};
  auto res = detail::admm_l1<Scalar>(p.A, p.y, blocks, opts);
  detail::fill_residuals<Scalar>(res, p.A, p.y, blocks, false,
                                 static_cast<Scalar>(opts.feasibility_slack));
  return res;
}

/// Constraint residuals are reported as [l2 group 1, l-inf group 1, l2 group 2,
/// l-inf group 2]. An infeasible box intersection is retried with the boxes
/// dropped; the returned result then has boxes_dropped set.
template <typename Scalar>
SolverResult<Scalar> gq_side_solve(const GqSideProblem<Scalar>& p, const SolverOptions& opts = {}) {
  const auto& g1 = p.group1;
  const auto& g2 = p.group2;
  const Index n = std::max(g1.A.cols(), g2.A.cols());
  if (g1.A.rows() + g2.A.rows() == 0) throw DimensionError("gq_side_solve: both groups empty");
  for (const auto* g : {&g1, &g2}) {
    if (g->A.rows() > 0 && g->A.cols() != n) throw DimensionError("gq_side_solve: column mismatch");
    detail::check_inputs(g->A, g->y, g->epsilon);
    if (!(g->delta > Scalar(0))) throw ConfigError("gq_side_solve: delta must be positive");
  }
  MatrixX<Scalar> a(g1.A.rows() + g2.A.rows(), n);
  VectorX<Scalar> y(a.rows());
  if (g1.A.rows() > 0) a.topRows(g1.A.rows()) = g1.A;
  if (g2.A.rows() > 0) a.bottomRows(g2.A.rows()) = g2.A;
  y << g1.y, g2.y;
  std::vector<ConstraintBlock<Scalar>> blocks{
      {0, g1.A.rows(), g1.epsilon, g1.delta / Scalar(2)},
      {g1.A.rows(), g2.A.rows(), g2.epsilon, g2.delta / Scalar(2)}};

  auto res = detail::admm_l1<Scalar>(a, y, blocks, opts);
  if (res.status == SolverStatus::infeasible) {
    auto relaxed = blocks;
    for (auto& b : relaxed) b.half_width = std::numeric_limits<Scalar>::infinity();
    res = detail::admm_l1<Scalar>(a, y, relaxed, opts);
    res.boxes_dropped = true;
  }
  auto enforced = blocks;
  if (res.boxes_dropped) {
    for (auto& b : enforced) b.half_width = std::numeric_limits<Scalar>::infinity();
  }
  detail::fill_residuals<Scalar>(res, a, y, enforced, true,
                                 static_cast<Scalar>(opts.feasibility_slack));
  return res;
}

inline const char* to_string(SolverStatus s) noexcept {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::iteration_limit: return "iteration_limit";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

}  // namespace csmdc

#endif  // CSMDC_SOLVERS_HPP
