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

// Parametric mean-variance problem
//
//   min  1/2 x^T Q x - eta p^T x   s.t.  Te x = te,  Tl x <= tl,  x >= 0,
//
// solved through its KKT conditions written as a linear system in
// nonnegative variables (the EVO tableau) plus complementarity, which the
// simplex engine honours through a tabu veto on complementary pairs.

#ifndef CPOINT_PARAMETRIC_QP_HPP_
#define CPOINT_PARAMETRIC_QP_HPP_

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cpoint/matrix.hpp"
#include "cpoint/simplex.hpp"

namespace cpoint {

struct QpModel {
  std::vector<std::string> names;
  Matrix q;
  Vector p;
  Matrix eq;  // Te
  Vector eq_rhs;
  Matrix ineq;  // Tl
  Vector ineq_rhs;

  std::size_t n() const { return p.size(); }
  std::size_t me() const { return eq_rhs.size(); }
  std::size_t ml() const { return ineq_rhs.size(); }

  // Throws DimensionMismatch, InvalidArgument (asymmetric or non-finite Q)
  // or NotPositiveDefinite.
  void validate() const;

  friend bool operator==(const QpModel&, const QpModel&) = default;
};

// Column offsets of the blocks [x l ep en s yl ye yq] and row offsets of
// [Tl-rows Te-rows Q-rows].
struct EvoLayout {
  std::size_t n = 0, ml = 0, me = 0;
  std::size_t x = 0, l = 0, ep = 0, en = 0, s = 0, yl = 0, ye = 0, yq = 0;
  std::size_t cols = 0;
  std::size_t row_tl = 0, row_te = 0, row_q = 0;
  std::size_t rows = 0;
};

EvoLayout evo_layout(std::size_t n, std::size_t ml, std::size_t me);

struct EvoTableau {
  EvoLayout layout;
  Matrix a;
  Vector rhs_base;  // [tl; te; 0]
  Vector rhs_dir;   // [0; 0; p]
  // complement[j] is the partner of column j, or npos. Pairs: x/s, l/yl,
  // ep/en. The first two are the tabu pairs.
  std::vector<std::size_t> complement;
  std::vector<char> artificial;  // ye and yq columns
  // Textbook starting vertex yl = tl, ye = |te|, yq = |eta p|; primal
  // feasible only when tl >= 0.
  std::vector<std::size_t> standard_start;
  bool standard_start_feasible = false;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Vector rhs(double eta) const;
  std::vector<std::pair<std::size_t, std::size_t>> tabu_pairs() const;
};

// Assembles the tableau with Dq = diag(sign(eta p)) and De = diag(sign(te)),
// sign(0) = +1.
EvoTableau assemble_evo(const QpModel& model, double eta);

struct FixedEtaSolution {
  double eta = 0.0;
  Vector x;
  Vector s;   // multipliers of x >= 0
  Vector l;   // multipliers of Tl x <= tl
  Vector e;   // multipliers of Te x = te (free sign)
  EvoTableau tableau;
  BasisState basis;
  std::vector<std::size_t> redundant_rows;  // model rows dropped as dependent
  std::size_t pivots = 0;
};

struct QpSolveOptions {
  double tol = 1e-9;
};

// Minimizer at one eta. Throws InfeasibleModel, NotPositiveDefinite,
// CycleLimit or NumericalBreakdown.
FixedEtaSolution solve_fixed_eta(const QpModel& model, double eta, const QpSolveOptions& options = {});

struct KktResidual {
  double stationarity = 0.0;     // |Qx + Tl^T l + Te^T e - s - eta p|_inf
  double primal = 0.0;           // equality and inequality violation
  double sign = 0.0;             // negativity of x, s, l
  double complementarity = 0.0;  // max |x_i s_i|, |l_k slack_k|
  double max() const;
};

KktResidual kkt_residual(const QpModel& model, double eta, std::span<const double> x,
                         std::span<const double> s, std::span<const double> l,
                         std::span<const double> e);

struct CriticalPoint {
  double eta = 0.0;
  Vector x;
  Vector s;
  Vector l;
  Vector e;
  double ret = 0.0;       // p^T x
  double variance = 0.0;  // x^T Q x
};

struct CriticalPath {
  std::vector<std::string> names;
  std::vector<CriticalPoint> points;
  std::vector<double> cross;  // x_k^T Q x_{k+1}
  // True when the last basis stays optimal for every larger eta; the
  // portfolio then moves along tail (zero for a bounded feasible set).
  bool open_ended = false;
  Vector tail;
  std::size_t pivots = 0;
  std::size_t restarts = 0;
};

struct SweepOptions {
  double eta_max = 1e6;
  double merge_tol = 1e-9;
  double tol = 1e-9;
};

// Critical line from eta = 0 up to the end of the efficient set.
CriticalPath sweep(const QpModel& model, const SweepOptions& options = {});

}  // namespace cpoint

#endif  // CPOINT_PARAMETRIC_QP_HPP_
