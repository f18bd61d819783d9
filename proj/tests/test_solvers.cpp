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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "csmdc/core_model.hpp"
#include "csmdc/error.hpp"
#include "csmdc/random.hpp"
#include "csmdc/solvers.hpp"
#include "oracles/lp_oracle.hpp"

using namespace csmdc;

namespace {

std::vector<std::vector<double>> rows_of(const Matrix& a) {
  std::vector<std::vector<double>> out(a.rows(), std::vector<double>(a.cols()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out[i][j] = a(i, j);
  return out;
}

SolverOptions tight() {
  SolverOptions o;
  o.abs_tol = 1e-10;
  o.rel_tol = 1e-8;
  o.max_iters = 50000;
  return o;
}

void expect_feasible(const SolverResult<double>& r, double slack) {
  ASSERT_EQ(r.constraint_residuals.size(), r.constraint_bounds.size());
  for (std::size_t c = 0; c < r.constraint_residuals.size(); ++c) {
    EXPECT_LE(r.constraint_residuals[c], r.constraint_bounds[c] * (1 + slack) + 1e-9) << "constraint " << c;
  }
}

}  // namespace

TEST(DefaultEpsilon, Examples) {
  EXPECT_EQ(default_epsilon(0.25, 0), 0.0);
  EXPECT_NEAR(default_epsilon(0.25, 25), 0.25 * std::sqrt(25.0 / 12.0), 1e-15);
  EXPECT_NEAR(default_epsilon(0.25, 25), 0.3608, 1e-4);
  EXPECT_EQ(default_epsilon(0.25, 25, 2.0), 2.0 * default_epsilon(0.25, 25));
  EXPECT_THROW(default_epsilon(0.0, 3), ConfigError);
}

TEST(ProjectBallBox, MatchesBruteForceOnGrid) {
  // Minimizes |p - d| over p in ball(r) and box(h) by dense search over t in
  // p = clip(t d); compare against the exact breakpoint routine.
  Rng rng(1);
  std::vector<double> scratch;
  for (int trial = 0; trial < 200; ++trial) {
    VectorX<double> d(5);
    for (int i = 0; i < 5; ++i) d(i) = 3 * rng.normal();
    const double r = 0.5 + 3 * rng.uniform();
    const double h = 0.2 + 2 * rng.uniform();
    VectorX<double> p = d;
    detail::project_ball_box<double>(p, r, h, scratch);
    EXPECT_LE(p.norm(), r * (1 + 1e-12));
    EXPECT_LE(p.cwiseAbs().maxCoeff(), h * (1 + 1e-12));
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 20000; ++s) {
      const VectorX<double> q = (d * (s / 20000.0)).cwiseMax(-h).cwiseMin(h);
      if (q.norm() <= r) best = std::min(best, (q - d).norm());
    }
    EXPECT_LE((p - d).norm(), best + 1e-9);
  }
}

TEST(Bpdn, ZeroWhenEpsilonCoversY) {
  const auto phi = gen_sensing_matrix(10, 30, 1);
  VectorX<double> y = phi.entries * gen_sparse_signal({30, 3, 1.0, 2}).theta;
  const auto r = bpdn<double>({phi.entries, y, y.norm() * 1.01});
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.theta_hat.lpNorm<1>(), 1e-8);
}

TEST(Bpdn, IdentityEqualityPinsSolution) {
  VectorX<double> y(6);
  y << 1, -2, 0, 0.5, 3, -0.25;
  const auto r = bpdn<double>({Matrix::Identity(6, 6), y, 0.0}, tight());
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.theta_hat - y).norm(), 1e-8);
}

TEST(Bpdn, RecoversSmallSparseInstance) {
  const auto phi = gen_sensing_matrix(8, 12, 5);
  const auto x = gen_sparse_signal({12, 2, 1.0, 6});
  const VectorX<double> y = phi.entries * x.theta;
  const auto r = bpdn<double>({phi.entries, y, 0.0}, tight());
  ASSERT_TRUE(r.converged);
  EXPECT_LT(relative_distortion(x.theta, r.theta_hat), 1e-4);
  const auto lp = oracle::l1_equality(rows_of(phi.entries), std::vector<double>(y.data(), y.data() + y.size()));
  ASSERT_TRUE(lp);
  EXPECT_NEAR(r.l1(), lp->l1, 1e-4 * lp->l1);
}

TEST(Bpdn, MatchesLpOracleOnRandomInstances) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Index n = 6 + Index(rng.uniform_index(7));
    const Index k = 1 + Index(rng.uniform_index(2));
    const Index m = 2 * k + 2 + Index(rng.uniform_index(std::uint64_t(n - 2 * k - 1)));
    const auto phi = gen_sensing_matrix(m, n, rng.next_u64());
    // A dense right-hand side exercises the LP beyond exact recovery.
    VectorX<double> y(m);
    for (Index i = 0; i < m; ++i) y(i) = rng.normal();
    const auto r = bpdn<double>({phi.entries, y, 0.0}, tight());
    // Square, dense instances can stall short of the tight tolerances while
    // already agreeing with the LP; only the objective and feasibility count.
    EXPECT_NE(r.status, SolverStatus::infeasible) << t;
    expect_feasible(r, 1e-3);
    const auto lp = oracle::l1_equality(rows_of(phi.entries), std::vector<double>(y.data(), y.data() + m));
    ASSERT_TRUE(lp);
    EXPECT_NEAR(r.l1(), lp->l1, 1e-4 * lp->l1) << "n=" << n << " m=" << m;
  }
}

TEST(Bpdn, Deterministic) {
  const auto phi = gen_sensing_matrix(20, 60, 3);
  const VectorX<double> y = phi.entries * gen_sparse_signal({60, 4, 1.0, 4}).theta;
  const auto a = bpdn<double>({phi.entries, y, 0.01});
  const auto b = bpdn<double>({phi.entries, y, 0.01});
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Bpdn, IterationLimitIsNotAnException) {
  const auto phi = gen_sensing_matrix(20, 60, 3);
  const VectorX<double> y = phi.entries * gen_sparse_signal({60, 4, 1.0, 4}).theta;
  SolverOptions o;
  o.max_iters = 3;
  const auto r = bpdn<double>({phi.entries, y, 1e-3}, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.status, SolverStatus::iteration_limit);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(r.theta_hat.size(), 60);
}

TEST(Bpdn, RejectsBadInput) {
  Matrix a = Matrix::Ones(2, 3);
  VectorX<double> y = VectorX<double>::Ones(2);
  EXPECT_THROW(bpdn<double>({a, y, -1.0}), ConfigError);
  y(0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(bpdn<double>({a, y, 1.0}), ConfigError);
  EXPECT_THROW(bpdn<double>({a, VectorX<double>::Ones(3), 1.0}), DimensionError);
}

TEST(Bpdn, FloatScalar) {
  const auto phi = gen_sensing_matrix(30, 60, 8);
  const auto x = gen_sparse_signal({60, 3, 1.0, 9});
  const Eigen::MatrixXf a = phi.entries.cast<float>();
  const Eigen::VectorXf y = a * x.theta.cast<float>();
  SolverOptions o;
  o.abs_tol = 1e-5;
  const auto r = bpdn<float>({a, y, 1e-3f}, o);
  EXPECT_LT((r.theta_hat.cast<double>() - x.theta).norm() / x.theta.norm(), 1e-2);
}

TEST(Bpdn, MeritSettlesAfterBurnIn) {
  // ADMM is not a descent method; the merit is compared on checkpoints
  // 50 iterations apart after a 200-iteration burn-in.
  const auto phi = gen_sensing_matrix(50, 256, 11);
  const auto x = gen_sparse_signal({256, 10, 1.0, 12});
  const VectorX<double> y = phi.entries * x.theta;
  SolverOptions o;
  o.record_trajectory = true;
  o.adaptive_penalty = false;
  const auto r = bpdn<double>({phi.entries, y, 0.05}, o);
  ASSERT_GT(r.merit_trajectory.size(), 300u);
  const auto& t = r.merit_trajectory;
  for (std::size_t i = 200; i + 50 < t.size(); i += 50) {
    EXPECT_LE(t[i + 50], t[i] * (1 + 1e-3)) << "iteration " << i;
  }
}

TEST(GqSide, LooseBoxesMatchBpdn) {
  const auto phi = gen_sensing_matrix(30, 80, 13);
  const auto x = gen_sparse_signal({80, 4, 1.0, 14});
  const VectorX<double> y = phi.entries * x.theta + 0.01 * VectorX<double>::Ones(30);
  GqSideProblem<double> p;
  p.group1 = {phi.entries, y, 0.1, std::numeric_limits<double>::infinity()};
  p.group2 = {Matrix(0, 80), VectorX<double>(0), 0.0, std::numeric_limits<double>::infinity()};
  const auto g = gq_side_solve(p, tight());
  const auto b = bpdn<double>({phi.entries, y, 0.1}, tight());
  ASSERT_TRUE(g.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_NEAR(g.l1(), b.l1(), 1e-4 * b.l1());
  EXPECT_EQ(g.constraint_residuals.size(), 4u);
}

TEST(GqSide, GroundTruthFeasibleAndResultFeasible) {
  const Index n = 256, m = 50;
  const auto phi = gen_sensing_matrix(m, n, 21);
  const auto x = gen_sparse_signal({n, 10, 1.0, 22});
  const VectorX<double> y = phi.entries * x.theta;
  const double S = y.cwiseAbs().maxCoeff();
  const double d1 = 2 * S / 64, d2 = 2 * S / 4;
  auto q = [&](double v, double d) { return -S + (std::min(std::floor((v + S) / d), 2 * S / d - 1) + 0.5) * d; };
  GqSideProblem<double> p;
  p.group1.A = phi.entries.topRows(25);
  p.group2.A = phi.entries.bottomRows(25);
  p.group1.y.resize(25);
  p.group2.y.resize(25);
  for (Index i = 0; i < 25; ++i) {
    p.group1.y(i) = q(y(i), d1);
    p.group2.y(i) = q(y(25 + i), d2);
  }
  p.group1.delta = d1;
  p.group2.delta = d2;
  p.group1.epsilon = default_epsilon(d1, 25);
  p.group2.epsilon = default_epsilon(d2, 25);
  // The truth satisfies both boxes exactly.
  EXPECT_LE((p.group1.y - p.group1.A * x.theta).cwiseAbs().maxCoeff(), d1 / 2 + 1e-12);
  EXPECT_LE((p.group2.y - p.group2.A * x.theta).cwiseAbs().maxCoeff(), d2 / 2 + 1e-12);
  const auto r = gq_side_solve(p);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.boxes_dropped);
  expect_feasible(r, 1e-3);
  EXPECT_LE(r.l1(), x.theta.lpNorm<1>() * (1 + 1e-3));
}

TEST(GqSide, InfeasibleBoxesFallBack) {
  // Two copies of the same row with values 1 apart and boxes of half-width
  // 0.05 cannot both hold.
  Matrix a(2, 3);
  a << 1, 0, 1, 1, 0, 1;
  GqSideProblem<double> p;
  p.group1 = {a.topRows(1), VectorX<double>::Constant(1, 0.0), 1.0, 0.1};
  p.group2 = {a.bottomRows(1), VectorX<double>::Constant(1, 1.0), 1.0, 0.1};
  SolverOptions o;
  o.max_iters = 2000;
  const auto r = gq_side_solve(p, o);
  EXPECT_TRUE(r.boxes_dropped);
  EXPECT_TRUE(std::isinf(r.constraint_bounds[1]));
}

TEST(GqSide, RejectsEmptyProblem) {
  GqSideProblem<double> p;
  EXPECT_THROW(gq_side_solve(p), DimensionError);
}
