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

// Revised simplex on the standard form  min c^T x,  A x = d,  x >= 0.
//
// Reduced costs follow the convention z_j = y^T a_j - c_j with y = B^{-T} c_B,
// so a column is attractive when z_j > 0 and a basis is optimal when every
// admissible z_j <= tol.

#ifndef CPOINT_SIMPLEX_HPP_
#define CPOINT_SIMPLEX_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpoint/matrix.hpp"
#include "cpoint/moment_set.hpp"
#include "cpoint/numerics.hpp"

namespace cpoint {

struct StandardLp {
  Matrix a;
  Vector d;
  Vector c;

  std::size_t rows() const { return a.rows(); }
  std::size_t cols() const { return a.cols(); }
};

struct BasisState {
  std::vector<std::size_t> basic;     // basis order, matches factors.basis_columns
  std::vector<std::size_t> residual;  // ascending
  QrFactors factors;

  std::optional<std::size_t> position_of(std::size_t var) const;
  bool is_basic(std::size_t var) const { return position_of(var).has_value(); }
};

BasisState make_basis(const Matrix& a, std::vector<std::size_t> basic);
// Exchanges the basic variable at leaving_pos for `entering`.
void pivot(BasisState& state, const Matrix& a, std::size_t leaving_pos, std::size_t entering);
// Values of the basic variables for right-hand side d, in basis order.
Vector basic_values(const BasisState& state, std::span<const double> d);
// Full primal vector of length a.cols().
Vector primal_vector(const BasisState& state, std::size_t cols, std::span<const double> d);

enum class EnteringRule {
  kLargestReducedCost,  // Dantzig
  kFirstIndex,          // first attractive column in index order
};

// Returns true when `entering` must not enter from `state`.
using PivotVeto = std::function<bool(std::size_t entering, const BasisState& state)>;

struct SimplexOptions {
  EnteringRule rule = EnteringRule::kLargestReducedCost;
  PivotVeto veto;
  double tol = 1e-9;
  // Consecutive non-improving pivots before switching to Bland's rule;
  // 0 selects 3 (n + m).
  std::size_t bland_after = 0;
  // 0 selects 50 (n + m).
  std::size_t max_iterations = 0;
};

enum class LpStatus { kOptimal, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  Vector x;
  double value = 0.0;
  Vector duals;          // y = B^{-T} c_B
  Vector reduced_costs;  // z_j for j in basis.residual order
  BasisState basis;
  std::size_t pivots = 0;
  std::optional<std::size_t> unbounded_column;
};

// Runs from a primal feasible start. Throws CycleLimit past the iteration cap.
LpSolution simplex_solve(const StandardLp& lp, BasisState start, const SimplexOptions& options = {});

struct Phase1Result {
  bool feasible = false;
  StandardLp lp;  // input with redundant rows removed
  BasisState basis;
  std::vector<std::size_t> redundant_rows;  // indices into the input rows
  std::vector<std::string> log;
  double infeasibility = 0.0;
};

// Finds a feasible basis through the auxiliary problem with columns
// diag(sign(d)), reusing unit columns of A where d_i >= 0.
Phase1Result phase1(const StandardLp& lp, const SimplexOptions& options = {});

// phase1 followed by simplex_solve. Throws InfeasibleModel.
LpSolution solve_lp(const StandardLp& lp, const SimplexOptions& options = {});

// Interval of eta over which `basis` stays primal feasible for the right
// hand side t + eta p. Leaving indices are basis positions.
struct RhsRange {
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  std::optional<std::size_t> leaving_lo;
  std::optional<std::size_t> leaving_hi;
};

RhsRange parametric_rhs_range(const BasisState& basis, std::span<const double> t,
                              std::span<const double> p);

// Linearized Sharpe problem
//   max  eta (a + a0 b)^T x - s0 b^T x   s.t.  1^T x = 1,  x >= 0,
// with optional caps x_i <= kappa / n carried by slack columns.
struct SharpeInputs {
  Vector a;
  Vector b;
  double a0 = 0.0;
  double s0 = 0.0;
  double eta = 1.0;
  std::optional<double> kappa;
};

StandardLp build_sharpe_lp(const MomentSet& ms, const SharpeInputs& in);

}  // namespace cpoint

#endif  // CPOINT_SIMPLEX_HPP_
