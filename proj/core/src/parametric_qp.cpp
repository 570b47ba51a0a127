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

#include "cpoint/parametric_qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpoint/error.hpp"
#include "cpoint/numerics.hpp"

namespace cpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Model rows that survive phase 1, plus the solver state on the reduced model.
struct Pcl {
  QpModel reduced;
  std::vector<std::size_t> keep_ineq;
  std::vector<std::size_t> keep_eq;
  EvoTableau tab;
  BasisState basis;
  std::size_t pivots = 0;
};

QpModel drop_rows(const QpModel& m, const std::vector<std::size_t>& keep_ineq,
                  const std::vector<std::size_t>& keep_eq) {
  QpModel r;
  r.names = m.names;
  r.q = m.q;
  r.p = m.p;
  r.ineq = Matrix(keep_ineq.size(), m.n());
  r.ineq_rhs.resize(keep_ineq.size());
  for (std::size_t k = 0; k < keep_ineq.size(); ++k) {
    for (std::size_t j = 0; j < m.n(); ++j) r.ineq(k, j) = m.ineq(keep_ineq[k], j);
    r.ineq_rhs[k] = m.ineq_rhs[keep_ineq[k]];
  }
  r.eq = Matrix(keep_eq.size(), m.n());
  r.eq_rhs.resize(keep_eq.size());
  for (std::size_t k = 0; k < keep_eq.size(); ++k) {
    for (std::size_t j = 0; j < m.n(); ++j) r.eq(k, j) = m.eq(keep_eq[k], j);
    r.eq_rhs[k] = m.eq_rhs[keep_eq[k]];
  }
  return r;
}

PivotVeto complementarity_veto(const EvoTableau& tab) {
  return [&tab](std::size_t j, const BasisState& st) {
    if (tab.artificial[j]) return true;
    const std::size_t c = tab.complement[j];
    return c != EvoTableau::npos && st.is_basic(c);
  };
}

// Pivots basic artificials sitting at zero out of the basis.
void drive_out_artificials(const EvoTableau& tab, BasisState& st, const PivotVeto& veto) {
  const std::size_t m = tab.a.rows();
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t pos = 0; pos < m; ++pos) {
      if (!tab.artificial[st.basic[pos]]) continue;
      Vector e(m, 0.0);
      e[pos] = 1.0;
      const Vector rho = qr_solve_transpose(st.factors, e);
      std::optional<std::size_t> best;
      double best_abs = 1e-9;
      for (std::size_t j : st.residual) {
        if (veto(j, st)) continue;
        double alpha = 0.0;
        for (std::size_t i = 0; i < m; ++i) alpha += rho[i] * tab.a(i, j);
        if (std::abs(alpha) > best_abs) {
          best_abs = std::abs(alpha);
          best = j;
        }
      }
      if (best) {
        pivot(st, tab.a, pos, *best);
        progress = true;
        break;
      }
    }
  }
}

Pcl solve_pcl(const QpModel& model, double eta, const QpSolveOptions& options) {
  const std::size_t n = model.n();
  const std::size_t ml = model.ml();
  const std::size_t me = model.me();

  // Phase 1 on the constraint rows [Tl I; Te 0] over columns [x yl].
  StandardLp cons;
  cons.a = Matrix(ml + me, n + ml);
  cons.d.resize(ml + me);
  cons.c.assign(n + ml, 0.0);
  for (std::size_t k = 0; k < ml; ++k) {
    for (std::size_t j = 0; j < n; ++j) cons.a(k, j) = model.ineq(k, j);
    cons.a(k, n + k) = 1.0;
    cons.d[k] = model.ineq_rhs[k];
  }
  for (std::size_t k = 0; k < me; ++k) {
    for (std::size_t j = 0; j < n; ++j) cons.a(ml + k, j) = model.eq(k, j);
    cons.d[ml + k] = model.eq_rhs[k];
  }

  Pcl out;
  std::vector<std::size_t> start_basic;
  Vector x0(n, 0.0);
  if (ml + me > 0) {
    SimplexOptions o;
    o.tol = options.tol;
    Phase1Result p1 = phase1(cons, o);
    if (!p1.feasible) {
      throw Error(ErrorCode::kInfeasibleModel,
                  "constraints admit no portfolio (phase 1 infeasibility " +
                      std::to_string(p1.infeasibility) + ")");
    }
    std::vector<char> dropped(ml + me, 0);
    for (std::size_t r : p1.redundant_rows) dropped[r] = 1;
    std::vector<std::size_t> ineq_index(ml, EvoTableau::npos);
    for (std::size_t k = 0; k < ml; ++k) {
      if (dropped[k]) continue;
      ineq_index[k] = out.keep_ineq.size();
      out.keep_ineq.push_back(k);
    }
    for (std::size_t k = 0; k < me; ++k)
      if (!dropped[ml + k]) out.keep_eq.push_back(k);

    const Vector xb = basic_values(p1.basis, p1.lp.d);
    out.reduced = drop_rows(model, out.keep_ineq, out.keep_eq);
    const EvoLayout lay = evo_layout(n, out.keep_ineq.size(), out.keep_eq.size());
    for (std::size_t i = 0; i < p1.basis.basic.size(); ++i) {
      const std::size_t v = p1.basis.basic[i];
      if (v < n) {
        start_basic.push_back(lay.x + v);
        x0[v] = std::max(xb[i], 0.0);
      } else {
        const std::size_t k = ineq_index[v - n];
        if (k == EvoTableau::npos) {
          throw Error(ErrorCode::kNumericalBreakdown, "slack of a dropped row is basic");
        }
        start_basic.push_back(lay.yl + k);
      }
    }
  } else {
    out.reduced = model;
  }

  out.tab = assemble_evo(out.reduced, eta);
  EvoTableau& tab = out.tab;
  const EvoLayout& lay = tab.layout;

  // Orient the yq columns so that yq = |eta p - Q x0| is a feasible start.
  const Vector qx0 = model.q * x0;
  for (std::size_t i = 0; i < n; ++i) {
    tab.a(lay.row_q + i, lay.yq + i) = sign_or_one(eta * model.p[i] - qx0[i]);
    start_basic.push_back(lay.yq + i);
  }

  StandardLp lp;
  lp.a = tab.a;
  lp.d = tab.rhs(eta);
  lp.c.assign(lay.cols, 0.0);
  for (std::size_t i = 0; i < n; ++i) lp.c[lay.yq + i] = 1.0;

  SimplexOptions so;
  so.tol = options.tol;
  so.veto = complementarity_veto(tab);
  LpSolution sol = simplex_solve(lp, make_basis(lp.a, start_basic), so);
  if (sol.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kNumericalBreakdown, "complementary pivoting reported an unbounded ray");
  }
  const double scale = 1.0 + norm_inf(lp.d) + norm_inf(qx0);
  if (sol.value > 1e3 * options.tol * scale) {
    throw Error(ErrorCode::kNumericalBreakdown,
                "complementary pivoting stalled with residual " + std::to_string(sol.value));
  }
  out.pivots = sol.pivots;
  out.basis = std::move(sol.basis);
  drive_out_artificials(tab, out.basis, so.veto);
  return out;
}

Vector pcl_values(const Pcl& pcl, double eta) {
  Vector z = primal_vector(pcl.basis, pcl.tab.layout.cols, pcl.tab.rhs(eta));
  return z;
}

CriticalPoint point_from_values(const QpModel& model, const Pcl& pcl, const Vector& z, double eta) {
  const EvoLayout& lay = pcl.tab.layout;
  const std::size_t n = model.n();
  CriticalPoint cp;
  cp.eta = eta;
  cp.x.assign(n, 0.0);
  cp.s.assign(n, 0.0);
  cp.l.assign(model.ml(), 0.0);
  cp.e.assign(model.me(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cp.x[i] = std::max(z[lay.x + i], 0.0);
    cp.s[i] = std::max(z[lay.s + i], 0.0);
  }
  for (std::size_t k = 0; k < pcl.keep_ineq.size(); ++k)
    cp.l[pcl.keep_ineq[k]] = std::max(z[lay.l + k], 0.0);
  for (std::size_t k = 0; k < pcl.keep_eq.size(); ++k)
    cp.e[pcl.keep_eq[k]] = z[lay.ep + k] - z[lay.en + k];
  cp.ret = dot(model.p, cp.x);
  cp.variance = quadratic_form(model.q, cp.x, cp.x);
  return cp;
}

}  // namespace

void QpModel::validate() const {
  const std::size_t nn = n();
  if (q.rows() != nn || q.cols() != nn) {
    throw Error(ErrorCode::kDimensionMismatch, "Q must be n x n with n = |p|");
  }
  if (!names.empty() && names.size() != nn) {
    throw Error(ErrorCode::kDimensionMismatch, "names must match the asset count");
  }
  if (eq.rows() != eq_rhs.size() || (eq.rows() > 0 && eq.cols() != nn)) {
    throw Error(ErrorCode::kDimensionMismatch, "equality block shape");
  }
  if (ineq.rows() != ineq_rhs.size() || (ineq.rows() > 0 && ineq.cols() != nn)) {
    throw Error(ErrorCode::kDimensionMismatch, "inequality block shape");
  }
  auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  };
  if (!q.all_finite() || !finite(p) || !eq.all_finite() || !finite(eq_rhs) ||
      !ineq.all_finite() || !finite(ineq_rhs)) {
    throw Error(ErrorCode::kInvalidArgument, "model contains non-finite entries");
  }
  const double sym_tol = 1e-12 * std::max(1.0, max_abs(q));
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = i + 1; j < nn; ++j)
      if (std::abs(q(i, j) - q(j, i)) > sym_tol) {
        throw Error(ErrorCode::kInvalidArgument, "Q is not symmetric");
      }
  (void)cholesky(q);
}

EvoLayout evo_layout(std::size_t n, std::size_t ml, std::size_t me) {
  EvoLayout l;
  l.n = n;
  l.ml = ml;
  l.me = me;
  l.x = 0;
  l.l = l.x + n;
  l.ep = l.l + ml;
  l.en = l.ep + me;
  l.s = l.en + me;
  l.yl = l.s + n;
  l.ye = l.yl + ml;
  l.yq = l.ye + me;
  l.cols = l.yq + n;
  l.row_tl = 0;
  l.row_te = ml;
  l.row_q = ml + me;
  l.rows = ml + me + n;
  return l;
}

Vector EvoTableau::rhs(double eta) const {
  Vector r = rhs_base;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += eta * rhs_dir[i];
  return r;
}

std::vector<std::pair<std::size_t, std::size_t>> EvoTableau::tabu_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < layout.n; ++i) out.emplace_back(layout.x + i, layout.s + i);
  for (std::size_t k = 0; k < layout.ml; ++k) out.emplace_back(layout.yl + k, layout.l + k);
  return out;
}

EvoTableau assemble_evo(const QpModel& model, double eta) {
  const std::size_t n = model.n();
  const std::size_t ml = model.ml();
  const std::size_t me = model.me();
  if (model.q.rows() != n || model.q.cols() != n ||
      (ml > 0 && model.ineq.cols() != n) || (me > 0 && model.eq.cols() != n)) {
    throw Error(ErrorCode::kDimensionMismatch, "assemble_evo: inconsistent model");
  }
  EvoTableau t;
  t.layout = evo_layout(n, ml, me);
  const EvoLayout& L = t.layout;
  t.a = Matrix(L.rows, L.cols);
  t.rhs_base.assign(L.rows, 0.0);
  t.rhs_dir.assign(L.rows, 0.0);
  t.complement.assign(L.cols, EvoTableau::npos);
  t.artificial.assign(L.cols, 0);

  for (std::size_t k = 0; k < ml; ++k) {
    for (std::size_t j = 0; j < n; ++j) t.a(L.row_tl + k, L.x + j) = model.ineq(k, j);
    t.a(L.row_tl + k, L.yl + k) = 1.0;
    t.rhs_base[L.row_tl + k] = model.ineq_rhs[k];
  }
  for (std::size_t k = 0; k < me; ++k) {
    for (std::size_t j = 0; j < n; ++j) t.a(L.row_te + k, L.x + j) = model.eq(k, j);
    t.a(L.row_te + k, L.ye + k) = sign_or_one(model.eq_rhs[k]);
    t.rhs_base[L.row_te + k] = model.eq_rhs[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = L.row_q + i;
    for (std::size_t j = 0; j < n; ++j) t.a(r, L.x + j) = model.q(i, j);
    for (std::size_t k = 0; k < ml; ++k) t.a(r, L.l + k) = model.ineq(k, i);
    for (std::size_t k = 0; k < me; ++k) {
      t.a(r, L.ep + k) = model.eq(k, i);
      t.a(r, L.en + k) = -model.eq(k, i);
    }
    t.a(r, L.s + i) = -1.0;
    t.a(r, L.yq + i) = sign_or_one(eta * model.p[i]);
    t.rhs_dir[r] = model.p[i];
  }

  auto pair = [&t](std::size_t a, std::size_t b) {
    t.complement[a] = b;
    t.complement[b] = a;
  };
  for (std::size_t i = 0; i < n; ++i) pair(L.x + i, L.s + i);
  for (std::size_t k = 0; k < ml; ++k) pair(L.l + k, L.yl + k);
  for (std::size_t k = 0; k < me; ++k) pair(L.ep + k, L.en + k);
  for (std::size_t k = 0; k < me; ++k) t.artificial[L.ye + k] = 1;
  for (std::size_t i = 0; i < n; ++i) t.artificial[L.yq + i] = 1;

  t.standard_start_feasible = true;
  for (std::size_t k = 0; k < ml; ++k) {
    t.standard_start.push_back(L.yl + k);
    if (model.ineq_rhs[k] < 0.0) t.standard_start_feasible = false;
  }
  for (std::size_t k = 0; k < me; ++k) t.standard_start.push_back(L.ye + k);
  for (std::size_t i = 0; i < n; ++i) t.standard_start.push_back(L.yq + i);
  return t;
}

FixedEtaSolution solve_fixed_eta(const QpModel& model, double eta, const QpSolveOptions& options) {
  model.validate();
  Pcl pcl = solve_pcl(model, eta, options);
  const Vector z = pcl_values(pcl, eta);
  const CriticalPoint cp = point_from_values(model, pcl, z, eta);
  FixedEtaSolution out;
  out.eta = eta;
  out.x = cp.x;
  out.s = cp.s;
  out.l = cp.l;
  out.e = cp.e;
  for (std::size_t k = 0, a = 0; k < model.ml(); ++k) {
    if (a < pcl.keep_ineq.size() && pcl.keep_ineq[a] == k) {
      ++a;
    } else {
      out.redundant_rows.push_back(k);
    }
  }
  for (std::size_t k = 0, a = 0; k < model.me(); ++k) {
    if (a < pcl.keep_eq.size() && pcl.keep_eq[a] == k) {
      ++a;
    } else {
      out.redundant_rows.push_back(model.ml() + k);
    }
  }
  out.pivots = pcl.pivots;
  out.tableau = std::move(pcl.tab);
  out.basis = std::move(pcl.basis);
  return out;
}

double KktResidual::max() const {
  return std::max({stationarity, primal, sign, complementarity});
}

KktResidual kkt_residual(const QpModel& model, double eta, std::span<const double> x,
                         std::span<const double> s, std::span<const double> l,
                         std::span<const double> e) {
  const std::size_t n = model.n();
  KktResidual r;
  Vector g = model.q * x;
  for (std::size_t k = 0; k < model.ml(); ++k)
    for (std::size_t i = 0; i < n; ++i) g[i] += model.ineq(k, i) * l[k];
  for (std::size_t k = 0; k < model.me(); ++k)
    for (std::size_t i = 0; i < n; ++i) g[i] += model.eq(k, i) * e[k];
  for (std::size_t i = 0; i < n; ++i) {
    r.stationarity = std::max(r.stationarity, std::abs(g[i] - s[i] - eta * model.p[i]));
    r.sign = std::max({r.sign, -x[i], -s[i]});
    r.complementarity = std::max(r.complementarity, std::abs(x[i] * s[i]));
  }
  for (std::size_t k = 0; k < model.me(); ++k) {
    r.primal = std::max(r.primal, std::abs(dot(model.eq.row(k), x) - model.eq_rhs[k]));
  }
  for (std::size_t k = 0; k < model.ml(); ++k) {
    const double slack = model.ineq_rhs[k] - dot(model.ineq.row(k), x);
    r.primal = std::max(r.primal, -slack);
    r.sign = std::max(r.sign, -l[k]);
    r.complementarity = std::max(r.complementarity, std::abs(l[k] * slack));
  }
  return r;
}

CriticalPath sweep(const QpModel& model, const SweepOptions& options) {
  model.validate();
  QpSolveOptions qo;
  qo.tol = options.tol;

  CriticalPath path;
  path.names = model.names;
  Pcl cur = solve_pcl(model, 0.0, qo);
  path.pivots += cur.pivots;
  double eta = 0.0;
  const auto merge = [&options](double a, double b) {
    return std::abs(a - b) <= options.merge_tol * (1.0 + std::abs(a));
  };

  path.points.push_back(point_from_values(model, cur, pcl_values(cur, eta), eta));

  std::optional<Vector> slope_prev;
  std::size_t stuck = 0;
  const std::size_t cap = 50 * (cur.tab.layout.rows + cur.tab.layout.cols) + 100;

  for (std::size_t iter = 0;; ++iter) {
    if (iter > cap) {
      throw Error(ErrorCode::kNumericalBreakdown, "critical line sweep did not terminate");
    }
    const EvoLayout& lay = cur.tab.layout;
    const std::size_t m = lay.rows;
    const Vector tt = qr_solve(cur.basis.factors, cur.tab.rhs_base);
    const Vector pp = qr_solve(cur.basis.factors, cur.tab.rhs_dir);
    const double ptol = 1e-12 * std::max({norm_inf(pp), norm_inf(tt), 1e-300});

    double hi = kInf;
    std::optional<std::size_t> leave;
    bool pinned = false;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t var = cur.basis.basic[i];
      if (cur.tab.artificial[var]) {
        if (std::abs(pp[i]) > ptol) pinned = true;
        continue;
      }
      if (pp[i] < -ptol) {
        const double cand = -tt[i] / pp[i];
        if (cand < hi) {
          hi = cand;
          leave = i;
        }
      }
    }
    if (pinned) hi = eta;
    hi = std::max(hi, eta);

    Vector slope(model.n(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t var = cur.basis.basic[i];
      if (var >= lay.x && var < lay.x + lay.n) slope[var - lay.x] = pp[i];
    }

    if (hi == kInf || !merge(eta, hi)) {
      stuck = 0;
      if (slope_prev) {
        double diff = 0.0;
        for (std::size_t i = 0; i < slope.size(); ++i)
          diff = std::max(diff, std::abs(slope[i] - (*slope_prev)[i]));
        const double scale = 1.0 + std::max(norm_inf(slope), norm_inf(*slope_prev));
        if (diff > 1e-9 * scale && !merge(path.points.back().eta, eta)) {
          path.points.push_back(point_from_values(model, cur, pcl_values(cur, eta), eta));
        }
      }
      slope_prev = slope;
    } else if (++stuck > 2 * m || pinned) {
      // Degenerate run at a single eta; restart from a fresh solve just past it.
      const double eps = 1e-7 * (1.0 + eta);
      cur = solve_pcl(model, eta + eps, qo);
      path.pivots += cur.pivots;
      ++path.restarts;
      eta += eps;
      stuck = 0;
      continue;
    }

    if (hi == kInf) {
      const double scale = 1.0 + norm_inf(path.points.back().x);
      if (norm_inf(slope) <= 1e-9 * scale) {
        path.tail.assign(model.n(), 0.0);
      } else {
        path.tail = slope;
        if (options.eta_max > eta) {
          path.points.push_back(
              point_from_values(model, cur, pcl_values(cur, options.eta_max), options.eta_max));
        }
      }
      path.open_ended = true;
      break;
    }
    if (hi >= options.eta_max) {
      path.points.push_back(
          point_from_values(model, cur, pcl_values(cur, options.eta_max), options.eta_max));
      path.open_ended = false;
      break;
    }

    // Complementary pivot: the blocking variable leaves, its partner enters.
    const std::size_t leaving_var = cur.basis.basic[*leave];
    const std::size_t entering = cur.tab.complement[leaving_var];
    bool ok = entering != EvoTableau::npos;
    if (ok) {
      const Vector w = qr_solve(cur.basis.factors, cur.tab.a.column(entering));
      ok = std::abs(w[*leave]) > 1e-9 * std::max(1.0, norm_inf(w));
    }
    BasisState next;
    if (ok) {
      next = cur.basis;
      try {
        pivot(next, cur.tab.a, *leave, entering);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (ok) {
      const RhsRange r = parametric_rhs_range(next, cur.tab.rhs_base, cur.tab.rhs_dir);
      const double slack = 1e-9 * (1.0 + std::abs(hi));
      ok = r.eta_lo <= hi + slack && r.eta_hi >= hi - slack;
    }
    if (ok) {
      cur.basis = std::move(next);
      ++path.pivots;
      eta = hi;
    } else {
      const double eps = 1e-7 * (1.0 + hi);
      cur = solve_pcl(model, hi + eps, qo);
      path.pivots += cur.pivots;
      ++path.restarts;
      eta = hi + eps;
    }
  }

  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    path.cross.push_back(quadratic_form(model.q, path.points[k].x, path.points[k + 1].x));
  }
  return path;
}

}  // namespace cpoint
