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

// Option return moments under a lognormal underlying. Every leg's gross
// return is piecewise affine in e^x, so its moments reduce to truncated
// lognormal moments E[e^{kx} 1{lo < x < hi}], k = 0, 1, 2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cpoint/error.hpp"
#include "cpoint/moments.hpp"

namespace cpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double upper_tail(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// P(a < Z < b) for standard normal Z, without cancellation in either tail.
double prob_between(double a, double b) {
  if (!(b > a)) return 0.0;
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
  return 1.0 - upper_tail(-a) - upper_tail(b);
}

// E[e^{kx} 1{lo < x < hi}] for x ~ N(mu, sigma^2).
double partial_moment(int k, double lo, double hi, double mu, double sigma) {
  if (sigma <= 0.0) return (mu > lo && mu < hi) ? std::exp(k * mu) : 0.0;
  const double shift = mu + k * sigma * sigma;
  const double scale = std::exp(k * mu + 0.5 * k * k * sigma * sigma);
  return scale * prob_between((lo - shift) / sigma, (hi - shift) / sigma);
}

struct Piece {
  double lo, hi;  // in x
  double alpha;   // constant term
  double beta;    // coefficient on e^x
};

struct PieceList {
  Piece p[2];
  int n = 0;
};

PieceList pieces(const ReturnLeg& leg) {
  PieceList out;
  switch (leg.kind) {
    case LegKind::kUnderlying:
      out.p[out.n++] = {-kInf, kInf, 0.0, 1.0};
      break;
    case LegKind::kCall: {
      const double k = std::log(leg.strike / leg.spot);
      out.p[out.n++] = {k, kInf, -leg.strike / leg.premium, leg.spot / leg.premium};
      break;
    }
    case LegKind::kPut: {
      const double k = std::log(leg.strike / leg.spot);
      out.p[out.n++] = {-kInf, k, leg.strike / leg.premium, -leg.spot / leg.premium};
      break;
    }
  }
  return out;
}

void check_leg(const ReturnLeg& leg) {
  if (leg.kind == LegKind::kUnderlying) return;
  if (!(leg.strike > 0.0) || !(leg.premium > 0.0) || !(leg.spot > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "option strike, premium and spot must be positive");
  }
  if (!(leg.time_fraction > 0.0)) throw Error(ErrorCode::kInvalidArgument, "option span must be positive");
}

// Gross return moment E[g] for x ~ N(mu, sigma^2).
double gross_mean(const PieceList& g, double mu, double sigma) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const Piece& p = g.p[i];
    if (p.alpha != 0.0) s += p.alpha * partial_moment(0, p.lo, p.hi, mu, sigma);
    if (p.beta != 0.0) s += p.beta * partial_moment(1, p.lo, p.hi, mu, sigma);
  }
  return s;
}

// E[g h] when both are functions of the same x ~ N(mu, sigma^2).
double gross_product(const PieceList& g, const PieceList& h, double mu, double sigma) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < h.n; ++j) {
      const Piece& a = g.p[i];
      const Piece& b = h.p[j];
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (!(hi > lo)) continue;
      s += a.alpha * b.alpha * partial_moment(0, lo, hi, mu, sigma);
      s += (a.alpha * b.beta + a.beta * b.alpha) * partial_moment(1, lo, hi, mu, sigma);
      s += a.beta * b.beta * partial_moment(2, lo, hi, mu, sigma);
    }
  }
  return s;
}

double eval_gross(const PieceList& g, double x) {
  double v = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const Piece& p = g.p[i];
    if (x > p.lo && x < p.hi) v += p.alpha + p.beta * std::exp(x);
  }
  return v;
}

struct LegLaw {
  double mu;
  double sigma;
};

LegLaw leg_law(const ReturnLeg& leg, double mu, double sigma) {
  return {mu * leg.time_fraction, sigma * std::sqrt(leg.time_fraction)};
}

}  // namespace

double leg_expected_return(const ReturnLeg& leg, double mu, double sigma) {
  check_leg(leg);
  const LegLaw law = leg_law(leg, mu, sigma);
  return gross_mean(pieces(leg), law.mu, law.sigma) - 1.0;
}

double option_expected_return(const OptionSpec& opt, double mu, double sigma) {
  ReturnLeg leg{opt.kind, opt.strike, opt.premium, opt.spot, 1.0};
  return leg_expected_return(leg, mu, sigma);
}

double option_cov_same_asset(const ReturnLeg& a, const ReturnLeg& b, double mu, double sigma) {
  check_leg(a);
  check_leg(b);
  const double fa = a.time_fraction;
  const double fb = b.time_fraction;
  if (std::abs(fa - fb) <= 1e-12 * std::max(fa, fb)) {
    const LegLaw law = leg_law(a, mu, sigma);
    const PieceList ga = pieces(a);
    const PieceList gb = pieces(b);
    return gross_product(ga, gb, law.mu, law.sigma) -
           gross_mean(ga, law.mu, law.sigma) * gross_mean(gb, law.mu, law.sigma);
  }
  const double rho = std::sqrt(std::min(fa, fb) / std::max(fa, fb));
  return option_cov_cross_asset(a, {mu, sigma}, b, {mu, sigma}, rho);
}

double option_cov_cross_asset(const ReturnLeg& a, const UnderlyingLaw& la, const ReturnLeg& b,
                              const UnderlyingLaw& lb, double rho, double tol) {
  check_leg(a);
  check_leg(b);
  if (!(std::abs(rho) <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "|rho| must not exceed 1");
  const LegLaw xa = leg_law(a, la.mu, la.sigma);
  const LegLaw xb = leg_law(b, lb.mu, lb.sigma);
  const PieceList ga = pieces(a);
  const PieceList gb = pieces(b);
  const double mean_a = gross_mean(ga, xa.mu, xa.sigma);
  const double mean_b = gross_mean(gb, xb.mu, xb.sigma);
  const double var_a = gross_product(ga, ga, xa.mu, xa.sigma) - mean_a * mean_a;
  const double var_b = gross_product(gb, gb, xb.mu, xb.sigma) - mean_b * mean_b;
  const double scale = std::sqrt(std::max(var_a, 0.0) * std::max(var_b, 0.0));
  if (scale == 0.0 || xa.sigma == 0.0 || xb.sigma == 0.0) return 0.0;

  const double cond_sigma = xb.sigma * std::sqrt(std::max(0.0, 1.0 - rho * rho));
  // x_a = mu_a + sigma_a u with u standard normal; x_b | u is normal.
  auto integrand = [&](double u) {
    const double x = xa.mu + xa.sigma * u;
    const double ga_c = eval_gross(ga, x) - mean_a;
    if (ga_c == 0.0) return 0.0;
    const double cond_mu = xb.mu + rho * xb.sigma * u;
    const double hb_c = gross_mean(gb, cond_mu, cond_sigma) - mean_b;
    return kInvSqrt2Pi * std::exp(-0.5 * u * u) * ga_c * hb_c;
  };

  // The mass of phi(u) e^{c u} sits near u = c; 12 standard deviations past
  // it the tail is below 1e-30 of the total.
  const double c = xa.sigma + std::abs(rho) * xb.sigma;
  const double lo = -12.0 - c;
  const double hi = 12.0 + 2.0 * c;
  std::vector<double> cuts{lo, hi};
  auto add_cut = [&](double u) {
    if (std::isfinite(u) && u > lo && u < hi) cuts.push_back(u);
  };
  for (int i = 0; i < ga.n; ++i) {
    add_cut((ga.p[i].lo - xa.mu) / xa.sigma);
    add_cut((ga.p[i].hi - xa.mu) / xa.sigma);
  }
  if (cond_sigma == 0.0 && rho != 0.0) {
    for (int i = 0; i < gb.n; ++i) {
      add_cut((gb.p[i].lo - xb.mu) / (rho * xb.sigma));
      add_cut((gb.p[i].hi - xb.mu) / (rho * xb.sigma));
    }
  }
  std::sort(cuts.begin(), cuts.end());

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr unsigned kMaxDepth = 13;  // at most 8192 subintervals per piece
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double err = 0.0;
    total += Quad::integrate(integrand, cuts[i], cuts[i + 1], kMaxDepth, tol * 1e-2, &err);
    err_total += err;
  }
  if (!(err_total <= tol * scale) || !std::isfinite(total)) {
    throw Error(ErrorCode::kQuadratureFailure,
                "covariance quadrature error " + std::to_string(err_total) + " above tolerance");
  }
  return total;
}

double log_correlation(double rho_simple, double sa, double sb) {
  if (sa <= 0.0 || sb <= 0.0) return 0.0;
  const double arg = rho_simple * std::sqrt(std::expm1(sa * sa) * std::expm1(sb * sb));
  if (!(arg > -1.0)) {
    throw Error(ErrorCode::kInvalidCorrelation, "correlation is not attainable by lognormal returns");
  }
  return std::clamp(std::log1p(arg) / (sa * sb), -1.0, 1.0);
}

MomentSet extend_universe(const MomentSet& ms, const std::vector<OptionSpec>& options,
                          double horizon_days) {
  if (options.empty()) return ms;
  if (!(horizon_days > 0.0)) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  const Matrix s = covariance_from_corr(ms);
  const std::size_t n = ms.size();
  const std::size_t total = n + options.size();

  std::vector<UnderlyingLaw> law(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MomentPair lp = to_log(ms.er[i], ms.std[i]);
    law[i] = {lp.mean, lp.std};
  }

  std::vector<ReturnLeg> legs(total);
  std::vector<std::size_t> asset(total);
  for (std::size_t i = 0; i < n; ++i) {
    legs[i] = ReturnLeg{LegKind::kUnderlying, 0.0, 0.0, 0.0, 1.0};
    asset[i] = i;
  }
  MomentSet out;
  out.names = ms.names;
  out.er = ms.er;
  out.std = ms.std;
  for (std::size_t k = 0; k < options.size(); ++k) {
    const OptionSpec& o = options[k];
    const auto idx = ms.index_of(o.underlying);
    if (!idx) {
      throw Error(ErrorCode::kUnknownUnderlying,
                  "option " + o.name + " references unknown asset " + o.underlying);
    }
    if (o.kind == LegKind::kUnderlying) throw Error(ErrorCode::kInvalidArgument, "option kind must be call or put");
    if (o.exdays <= 0) throw Error(ErrorCode::kInvalidArgument, "option " + o.name + " has no time to expiry");
    legs[n + k] = ReturnLeg{o.kind, o.strike, o.premium, o.spot, o.exdays / horizon_days};
    asset[n + k] = *idx;
    out.names.push_back(o.name);
    out.er.push_back(leg_expected_return(legs[n + k], law[*idx].mu, law[*idx].sigma));
    out.std.push_back(0.0);
  }

  Matrix cov(total, total);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = s(i, j);
  for (std::size_t i = n; i < total; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t ai = asset[i];
      const std::size_t aj = asset[j];
      double v = 0.0;
      if (ai == aj) {
        v = option_cov_same_asset(legs[i], legs[j], law[ai].mu, law[ai].sigma);
      } else {
        const double fi = legs[i].time_fraction;
        const double fj = legs[j].time_fraction;
        const double rl = log_correlation(ms.correl(ai, aj), law[ai].sigma, law[aj].sigma);
        const double rho = rl * std::min(fi, fj) / std::sqrt(fi * fj);
        v = option_cov_cross_asset(legs[i], law[ai], legs[j], law[aj], rho);
      }
      cov(i, j) = cov(j, i) = v;
    }
  }
  for (std::size_t i = n; i < total; ++i) out.std[i] = std::sqrt(std::max(cov(i, i), 0.0));

  out.correl = Matrix::identity(total);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double c = 0.0;
      if (i < n) {
        c = ms.correl(i, j);
      } else {
        const double den = out.std[i] * out.std[j];
        c = den > 0.0 ? std::clamp(cov(i, j) / den, -1.0, 1.0) : 0.0;
      }
      out.correl(i, j) = out.correl(j, i) = c;
    }
  }
  const CorrelationReport rep = validate_correlation(out.correl);
  if (!rep.ok()) {
    throw Error(ErrorCode::kInvalidCorrelation, "extended correlation is invalid: " + rep.describe());
  }
  return out;
}

}  // namespace cpoint
