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

#include "cpoint/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cpoint/error.hpp"

namespace cpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& basic, std::size_t n) {
  std::vector<char> in(n, 0);
  for (std::size_t b : basic) in[b] = 1;
  std::vector<std::size_t> r;
  r.reserve(n - basic.size());
  for (std::size_t j = 0; j < n; ++j)
    if (!in[j]) r.push_back(j);
  return r;
}

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

std::optional<std::size_t> BasisState::position_of(std::size_t var) const {
  for (std::size_t i = 0; i < basic.size(); ++i)
    if (basic[i] == var) return i;
  return std::nullopt;
}

BasisState make_basis(const Matrix& a, std::vector<std::size_t> basic) {
  BasisState s;
  s.factors = qr_factor(a, basic);
  s.residual = complement_of(basic, a.cols());
  s.basic = std::move(basic);
  return s;
}

void pivot(BasisState& state, const Matrix& a, std::size_t leaving_pos, std::size_t entering) {
  const std::size_t leaving = state.basic.at(leaving_pos);
  state.factors = qr_replace_column(std::move(state.factors), a, leaving_pos, entering);
  state.basic.erase(state.basic.begin() + static_cast<std::ptrdiff_t>(leaving_pos));
  state.basic.push_back(entering);
  auto it = std::find(state.residual.begin(), state.residual.end(), entering);
  if (it != state.residual.end()) state.residual.erase(it);
  state.residual.insert(std::upper_bound(state.residual.begin(), state.residual.end(), leaving),
                        leaving);
}

Vector basic_values(const BasisState& state, std::span<const double> d) {
  return qr_solve(state.factors, d);
}

Vector primal_vector(const BasisState& state, std::size_t cols, std::span<const double> d) {
  Vector x(cols, 0.0);
  const Vector xb = basic_values(state, d);
  for (std::size_t i = 0; i < state.basic.size(); ++i) x[state.basic[i]] = xb[i];
  return x;
}

LpSolution simplex_solve(const StandardLp& lp, BasisState start, const SimplexOptions& options) {
  const std::size_t m = lp.rows();
  const std::size_t n = lp.cols();
  if (lp.d.size() != m || lp.c.size() != n || start.basic.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "simplex_solve: inconsistent dimensions");
  }
  const double tol = options.tol;
  const std::size_t bland_after = options.bland_after ? options.bland_after : 3 * (n + m);
  const std::size_t max_iter = options.max_iterations ? options.max_iterations : 50 * (n + m);

  LpSolution sol;
  sol.basis = std::move(start);
  BasisState& st = sol.basis;

  bool bland = false;
  std::size_t stalled = 0;
  std::size_t iterations = 0;

  while (true) {
    Vector xb = basic_values(st, lp.d);
    Vector cb(m);
    for (std::size_t i = 0; i < m; ++i) cb[i] = lp.c[st.basic[i]];
    const Vector y = qr_solve_transpose(st.factors, cb);

    // Pricing.
    std::optional<std::size_t> entering;
    double best = tol;
    for (std::size_t j : st.residual) {
      double z = -lp.c[j];
      for (std::size_t i = 0; i < m; ++i) z += y[i] * lp.a(i, j);
      if (z <= tol) continue;
      if (options.veto && options.veto(j, st)) continue;
      if (bland || options.rule == EnteringRule::kFirstIndex) {
        entering = j;
        break;
      }
      if (z > best) {
        best = z;
        entering = j;
      }
    }

    if (!entering) {
      sol.status = LpStatus::kOptimal;
      sol.duals = y;
      break;
    }

    const Vector w = qr_solve(st.factors, lp.a.column(*entering));
    const double piv_tol = tol * std::max(1.0, norm_inf(w));
    std::optional<std::size_t> leave;
    double ratio = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i] <= piv_tol) continue;
      const double r = std::max(xb[i], 0.0) / w[i];
      if (!leave || r < ratio - 1e-12 * (1.0 + ratio)) {
        leave = i;
        ratio = r;
      } else if (r <= ratio + 1e-12 * (1.0 + ratio)) {
        const bool take = bland ? st.basic[i] < st.basic[*leave] : w[i] > w[*leave];
        if (take) {
          leave = i;
          ratio = std::min(ratio, r);
        }
      }
    }

    if (!leave) {
      sol.status = LpStatus::kUnbounded;
      sol.unbounded_column = entering;
      sol.duals = y;
      break;
    }

    if (++iterations > max_iter) {
      throw Error(ErrorCode::kCycleLimit,
                  "simplex exceeded " + std::to_string(max_iter) + " iterations");
    }

    double z_enter = -lp.c[*entering];
    for (std::size_t i = 0; i < m; ++i) z_enter += y[i] * lp.a(i, *entering);
    const double objective = dot(cb, xb);
    if (ratio * z_enter <= 1e-12 * (1.0 + std::abs(objective))) {
      if (++stalled >= bland_after) bland = true;
    } else {
      stalled = 0;
    }

    pivot(st, lp.a, *leave, *entering);
    ++sol.pivots;
  }

  sol.x = primal_vector(st, n, lp.d);
  for (double& v : sol.x)
    if (v < 0.0 && v > -tol) v = 0.0;
  sol.value = dot(lp.c, sol.x);
  sol.reduced_costs.resize(st.residual.size());
  for (std::size_t k = 0; k < st.residual.size(); ++k) {
    const std::size_t j = st.residual[k];
    double z = -lp.c[j];
    for (std::size_t i = 0; i < m; ++i) z += sol.duals[i] * lp.a(i, j);
    sol.reduced_costs[k] = z;
  }
  return sol;
}

Phase1Result phase1(const StandardLp& lp, const SimplexOptions& options) {
  const std::size_t m = lp.rows();
  const std::size_t n = lp.cols();
  if (lp.d.size() != m || lp.c.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "phase1: inconsistent dimensions");
  }

  // Reuse unit columns e_i for rows with d_i >= 0.
  std::vector<std::optional<std::size_t>> unit(m);
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<std::size_t> hit;
    bool is_unit = true;
    for (std::size_t i = 0; i < m && is_unit; ++i) {
      const double v = lp.a(i, j);
      if (v == 0.0) continue;
      if (v == 1.0 && !hit) {
        hit = i;
      } else {
        is_unit = false;
      }
    }
    if (is_unit && hit && !unit[*hit] && lp.d[*hit] >= 0.0) unit[*hit] = j;
  }

  std::vector<std::size_t> art_rows;
  for (std::size_t i = 0; i < m; ++i)
    if (!unit[i]) art_rows.push_back(i);

  StandardLp aux;
  aux.a = Matrix(m, n + art_rows.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) aux.a(i, j) = lp.a(i, j);
  aux.d = lp.d;
  aux.c.assign(n + art_rows.size(), 0.0);
  std::vector<std::size_t> basic(m);
  for (std::size_t k = 0; k < art_rows.size(); ++k) {
    const std::size_t i = art_rows[k];
    aux.a(i, n + k) = sign_or_one(lp.d[i]);
    aux.c[n + k] = 1.0;
  }
  {
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) basic[i] = unit[i] ? *unit[i] : n + k++;
  }

  SimplexOptions aux_opts = options;
  aux_opts.veto = [&options, n](std::size_t j, const BasisState& s) {
    if (j >= n) return true;
    return options.veto ? options.veto(j, s) : false;
  };

  Phase1Result out;
  LpSolution aux_sol = simplex_solve(aux, make_basis(aux.a, basic), aux_opts);
  out.infeasibility = aux_sol.value;
  if (aux_sol.value > options.tol * (1.0 + norm_inf(lp.d))) {
    out.feasible = false;
    out.lp = lp;
    return out;
  }

  BasisState st = std::move(aux_sol.basis);
  std::vector<std::size_t> drop_rows;
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t pos = 0; pos < m; ++pos) {
      const std::size_t var = st.basic[pos];
      if (var < n) continue;
      Vector e(m, 0.0);
      e[pos] = 1.0;
      const Vector rho = qr_solve_transpose(st.factors, e);
      std::optional<std::size_t> best;
      double best_abs = 1e-9;
      for (std::size_t j : st.residual) {
        if (j >= n) continue;
        if (options.veto && options.veto(j, st)) continue;
        double alpha = 0.0;
        for (std::size_t i = 0; i < m; ++i) alpha += rho[i] * aux.a(i, j);
        if (std::abs(alpha) > best_abs) {
          best_abs = std::abs(alpha);
          best = j;
        }
      }
      if (best) {
        pivot(st, aux.a, pos, *best);
        progress = true;
        break;
      }
    }
  }

  std::vector<std::size_t> keep_rows;
  std::vector<std::size_t> final_basic;
  for (std::size_t pos = 0; pos < m; ++pos) {
    const std::size_t var = st.basic[pos];
    if (var >= n) {
      const std::size_t row = art_rows[var - n];
      drop_rows.push_back(row);
      out.log.push_back("RedundantRow: constraint row " + std::to_string(row) + " dropped");
    } else {
      final_basic.push_back(var);
    }
  }
  std::sort(drop_rows.begin(), drop_rows.end());
  for (std::size_t i = 0; i < m; ++i)
    if (!std::binary_search(drop_rows.begin(), drop_rows.end(), i)) keep_rows.push_back(i);

  out.lp.a = Matrix(keep_rows.size(), n);
  out.lp.d.resize(keep_rows.size());
  out.lp.c = lp.c;
  for (std::size_t r = 0; r < keep_rows.size(); ++r) {
    for (std::size_t j = 0; j < n; ++j) out.lp.a(r, j) = lp.a(keep_rows[r], j);
    out.lp.d[r] = lp.d[keep_rows[r]];
  }
  out.redundant_rows = drop_rows;
  out.basis = make_basis(out.lp.a, final_basic);
  out.feasible = true;
  return out;
}

LpSolution solve_lp(const StandardLp& lp, const SimplexOptions& options) {
  Phase1Result p1 = phase1(lp, options);
  if (!p1.feasible) {
    throw Error(ErrorCode::kInfeasibleModel, "linear program has no feasible point");
  }
  return simplex_solve(p1.lp, std::move(p1.basis), options);
}

RhsRange parametric_rhs_range(const BasisState& basis, std::span<const double> t,
                              std::span<const double> p) {
  const Vector tt = qr_solve(basis.factors, t);
  const Vector pp = qr_solve(basis.factors, p);
  const double ptol = 1e-11 * std::max(norm_inf(pp), 1e-300) + 1e-300;
  RhsRange r{-kInf, kInf, std::nullopt, std::nullopt};
  for (std::size_t j = 0; j < pp.size(); ++j) {
    if (pp[j] < -ptol) {
      const double eta = -tt[j] / pp[j];
      if (eta < r.eta_hi) {
        r.eta_hi = eta;
        r.leaving_hi = j;
      }
    } else if (pp[j] > ptol) {
      const double eta = -tt[j] / pp[j];
      if (eta > r.eta_lo) {
        r.eta_lo = eta;
        r.leaving_lo = j;
      }
    }
  }
  return r;
}

StandardLp build_sharpe_lp(const MomentSet& ms, const SharpeInputs& in) {
  const std::size_t n = ms.size();
  if (in.a.size() != n || in.b.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "Sharpe inputs must match the asset count");
  }
  if (in.kappa && !(*in.kappa >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kappa must be at least 1 for a feasible cap");
  }
  const std::size_t slack = in.kappa ? n : 0;
  StandardLp lp;
  lp.a = Matrix(1 + slack, n + slack);
  lp.d.assign(1 + slack, 0.0);
  lp.c.assign(n + slack, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    lp.a(0, j) = 1.0;
    lp.c[j] = -(in.eta * (in.a[j] + in.a0 * in.b[j]) - in.s0 * in.b[j]);
  }
  lp.d[0] = 1.0;
  for (std::size_t k = 0; k < slack; ++k) {
    lp.a(1 + k, k) = 1.0;
    lp.a(1 + k, n + k) = 1.0;
    lp.d[1 + k] = *in.kappa / static_cast<double>(n);
  }
  return lp;
}

}  // namespace cpoint
