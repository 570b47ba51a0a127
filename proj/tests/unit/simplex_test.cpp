// Copyright 2026 The cpoint Authors
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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cpoint/error.hpp"
#include "cpoint/simplex.hpp"
#include "oracles.hpp"

namespace cpoint {
namespace {

double dot_d(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// min -x1 - x2 with 0 <= x <= 1, slacks appended.
StandardLp unit_box() {
  StandardLp lp;
  lp.a = Matrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}});
  lp.d = {1, 1};
  lp.c = {-1, -1, 0, 0};
  return lp;
}

TEST(Simplex, UnitBoxReachesTopCorner) {
  const StandardLp lp = unit_box();
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.x[1], 1.0, 1e-12);
  EXPECT_NEAR(sol.value, -2.0, 1e-12);
  EXPECT_LE(sol.pivots, 3u);
  EXPECT_LE(std::fabs(sol.value - dot_d(sol.duals, lp.d)), 1e-10);
}

TEST(Simplex, FirstIndexRuleAgrees) {
  SimplexOptions opt;
  opt.rule = EnteringRule::kFirstIndex;
  const LpSolution sol = solve_lp(unit_box(), opt);
  EXPECT_NEAR(sol.value, -2.0, 1e-12);
}

// Random bounded LPs against brute-force vertex enumeration; optimality is
// also checked through dual feasibility and complementary slackness.
TEST(Simplex, MatchesVertexEnumeration) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 2 + trial % 3, n = m + 2 + trial % 4;
    StandardLp lp;
    lp.a = Matrix(m + 1, n);
    Vector x0(n);
    for (auto& v : x0) v = std::fabs(u(rng));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) lp.a(i, j) = u(rng);
    for (std::size_t j = 0; j < n; ++j) lp.a(m, j) = 1.0;  // bounds the region
    lp.d = lp.a * std::span<const double>(x0);
    lp.c.resize(n);
    for (auto& v : lp.c) v = u(rng);

    const auto ref = oracle::enumerate_vertices(lp.a, lp.d, lp.c);
    ASSERT_TRUE(ref.feasible);
    const LpSolution sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_NEAR(sol.value, ref.value, 1e-9) << "trial " << trial;
    EXPECT_LE(std::fabs(sol.value - dot_d(sol.duals, lp.d)), 1e-9);
    for (std::size_t j = 0; j < n; ++j) {
      double z = -lp.c[j];
      for (std::size_t i = 0; i < lp.rows(); ++i) z += sol.duals[i] * lp.a(i, j);
      EXPECT_LE(z, 1e-9) << "dual infeasible column " << j;
      EXPECT_LE(std::fabs(z * sol.x[j]), 1e-9);
      EXPECT_GE(sol.x[j], -1e-12);
    }
  }
}

TEST(Simplex, DetectsUnboundedRay) {
  StandardLp lp;
  lp.a = Matrix::from_rows({{1, -1}});
  lp.d = {1};
  lp.c = {-1, 0};
  const LpSolution sol = solve_lp(lp);
  EXPECT_EQ(sol.status, LpStatus::kUnbounded);
  ASSERT_TRUE(sol.unbounded_column);
}

TEST(Simplex, InfeasibleModelThrows) {
  StandardLp lp;
  lp.a = Matrix::from_rows({{1, 1}, {1, 1}});
  lp.d = {1, 2};
  lp.c = {0, 0};
  try {
    (void)solve_lp(lp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleModel);
  }
  EXPECT_FALSE(phase1(lp).feasible);
}

TEST(Simplex, RedundantRowIsDroppedAndLogged) {
  StandardLp lp;
  lp.a = Matrix::from_rows({{1, 1, 0}, {2, 2, 0}, {0, 1, 1}});
  lp.d = {1, 2, 1};
  lp.c = {1, 2, 3};
  const Phase1Result p = phase1(lp);
  ASSERT_TRUE(p.feasible);
  ASSERT_EQ(p.redundant_rows.size(), 1u);
  EXPECT_EQ(p.lp.rows(), 2u);
  ASSERT_FALSE(p.log.empty());
  const LpSolution sol = solve_lp(lp);
  const auto ref = oracle::enumerate_vertices(p.lp.a, p.lp.d, p.lp.c);
  EXPECT_NEAR(sol.value, ref.value, 1e-12);
}

// Beale's example cycles under the plain largest-coefficient rule without an
// anti-cycling fallback.
TEST(Simplex, BealeExampleTerminates) {
  StandardLp lp;
  lp.a = Matrix::from_rows({{0.25, -60, -1.0 / 25, 9, 1, 0, 0},
                            {0.5, -90, -1.0 / 50, 3, 0, 1, 0},
                            {0, 0, 1, 0, 0, 0, 1}});
  lp.d = {0, 0, 1};
  lp.c = {-0.75, 150, -1.0 / 50, 6, 0, 0, 0};
  const LpSolution sol = simplex_solve(lp, make_basis(lp.a, {4, 5, 6}));
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.value, -0.05, 1e-12);
}

TEST(Simplex, VetoBlocksColumn) {
  SimplexOptions opt;
  opt.veto = [](std::size_t j, const BasisState&) { return j == 1; };
  const StandardLp lp = unit_box();
  const LpSolution sol = simplex_solve(lp, make_basis(lp.a, {2, 3}), opt);
  EXPECT_NEAR(sol.x[1], 0.0, 1e-15);
  EXPECT_NEAR(sol.value, -1.0, 1e-12);
}

TEST(Simplex, CycleLimitThrows) {
  SimplexOptions opt;
  opt.max_iterations = 1;
  const StandardLp lp = unit_box();
  try {
    (void)simplex_solve(lp, make_basis(lp.a, {2, 3}), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleLimit);
  }
}

// The basis stays primal feasible for every eta inside the reported range and
// loses feasibility just outside it.
TEST(Simplex, ParametricRhsRange) {
  StandardLp lp = unit_box();
  const Vector t = {1.0, 0.5};
  const Vector p = {-0.25, 0.5};
  const BasisState basis = make_basis(lp.a, {0, 1});
  const RhsRange r = parametric_rhs_range(basis, t, p);
  EXPECT_NEAR(r.eta_hi, 4.0, 1e-12);
  EXPECT_NEAR(r.eta_lo, -1.0, 1e-12);
  ASSERT_TRUE(r.leaving_hi && r.leaving_lo);
  EXPECT_EQ(basis.basic[*r.leaving_hi], 0u);
  EXPECT_EQ(basis.basic[*r.leaving_lo], 1u);
  auto values = [&](double eta) {
    Vector d = {t[0] + eta * p[0], t[1] + eta * p[1]};
    return basic_values(basis, d);
  };
  for (double x : values(3.9)) EXPECT_GE(x, 0.0);
  bool negative = false;
  for (double x : values(4.1)) negative = negative || x < 0.0;
  EXPECT_TRUE(negative);
}

TEST(Simplex, SharpeLpPicksBestScoreUnderCaps) {
  MomentSet ms;
  ms.names = {"A", "B", "C"};
  ms.er = {0.1, 0.2, 0.15};
  ms.std = {0.2, 0.3, 0.25};
  ms.correl = Matrix::identity(3);
  SharpeInputs in;
  in.a = {0.1, 0.3, 0.2};
  in.b = {1.0, 1.0, 1.0};
  in.eta = 1.0;
  LpSolution sol = solve_lp(build_sharpe_lp(ms, in));
  EXPECT_NEAR(sol.x[1], 1.0, 1e-12);
  in.kappa = 1.5;  // x_i <= 0.5
  sol = solve_lp(build_sharpe_lp(ms, in));
  EXPECT_NEAR(sol.x[1], 0.5, 1e-12);
  EXPECT_NEAR(sol.x[2], 0.5, 1e-12);
}

}  // namespace
}  // namespace cpoint
