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

// Return moments: estimation from price history under a lognormal model,
// conversions between log and simple moments, index models, and the
// extension of an asset universe with European options.

#ifndef CPOINT_MOMENTS_HPP_
#define CPOINT_MOMENTS_HPP_

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpoint/matrix.hpp"
#include "cpoint/moment_set.hpp"

namespace cpoint {

using Date = std::chrono::sys_days;

// dd/mm/yy (years 50..99 map to 19xx), dd/mm/yyyy or yyyy-mm-dd.
Date parse_date(std::string_view text);
std::string format_date(Date d);

struct PriceObservation {
  Date date;
  double price = 0.0;
};

struct PriceSeries {
  std::string asset;
  std::string deflator;
  double shares = 0.0;
  std::vector<PriceObservation> observations;  // strictly decreasing dates
};

// Header lines "Asset:", "Deflator:", "Shares:", an optional "Date Price"
// caption, rows "date price", terminated by '*' or end of input.
PriceSeries parse_price_series(std::string_view text);
PriceSeries read_price_series(const std::string& path);

struct FilterParams {
  Date final_date;
  int interval_days = 1;
  int samples = 0;      // number of log returns
  double extrap = 1.0;  // horizon in intervals
  double hurst = 0.5;
  int max_carry = 3;    // intervals a stale quote may be carried forward
};

struct FilterResult {
  MomentSet simple;      // simple-return moments over the horizon
  Vector mean_log;       // per-interval mean of log returns
  Vector std_log;        // per-interval standard deviation (1/samples)
  Vector horizon_mean;   // extrap * mean_log
  Vector horizon_std;    // extrap^hurst * std_log
  Matrix log_correl;
  std::vector<Date> grid;  // final date first
};

double hurst_factor(double extrap, double hurst);

// Throws MissingQuote, InsufficientSamples, InvalidArgument.
FilterResult filter_estimate(const std::vector<PriceSeries>& series, const FilterParams& params);

struct MomentPair {
  double mean = 0.0;
  double std = 0.0;
};

// Simple-return moments of exp(X) - 1 for X ~ N(m, s^2).
MomentPair to_simple(double log_mean, double log_std);
// Inverse of to_simple.
MomentPair to_log(double er, double std);

struct CorrelationViolation {
  enum class Kind { kDiagonal, kDominance, kSymmetry, kPositivity, kShape };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

struct CorrelationReport {
  std::vector<CorrelationViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

// Unit diagonal, |off-diagonal| <= 1, symmetry within 1e-10 and smallest
// eigenvalue above -1e-8 (Cholesky of C + 1e-8 I).
CorrelationReport validate_correlation(const Matrix& correl);

// S_ij = std_i std_j correl_ij. Throws InvalidCorrelation.
Matrix covariance_from_corr(const MomentSet& ms);

struct NamedMatrix {
  std::vector<std::string> names;
  Matrix values;
};

// First non-comment line lists the asset names, then one row per asset.
// '#' starts a comment.
NamedMatrix parse_correlation(std::string_view text);
std::string write_correlation(const std::vector<std::string>& names, const Matrix& correl);

// Moments in the modelling language's vector syntax: the universe set,
// er[all] and std[all], plus the scalars used to produce them.
std::string write_moments(const MomentSet& ms, const std::map<std::string, double>& scalars = {});

MomentPair portfolio_moments(const MomentSet& ms, const std::map<std::string, double>& weights);

// r = a + B c with independent residuals a.
struct IndexModel {
  Vector mean_a;
  Vector var_a;
  Matrix loadings;  // n x k
  Vector mean_c;
  Matrix cov_c;     // k x k
};

struct IndexMoments {
  Vector er;
  Matrix cov;
};

IndexMoments index_model_moments(const IndexModel& model);
// Rewrites the model with uncorrelated unit-variance indices d = L^{-1} c.
IndexModel diagonalize(const IndexModel& model);

// ---------------------------------------------------------------------------
// Options

enum class LegKind { kUnderlying, kCall, kPut };

// Gross return (R + 1) of one position as a function of the log price change
// x of its underlying over the leg's own time span.
struct ReturnLeg {
  LegKind kind = LegKind::kUnderlying;
  double strike = 0.0;
  double premium = 0.0;
  double spot = 0.0;
  double time_fraction = 1.0;  // span / horizon, scales the log moments
};

struct OptionSpec {
  std::string name;
  std::string underlying;
  LegKind kind = LegKind::kCall;
  double strike = 0.0;
  double premium = 0.0;
  double spot = 0.0;
  int exdays = 0;
};

// E[R] for the leg, with x ~ N(mu f, sigma^2 f).
double leg_expected_return(const ReturnLeg& leg, double mu, double sigma);
// Expected simple return of a European option held to expiry.
double option_expected_return(const OptionSpec& opt, double mu, double sigma);

// Cov of two legs on the same underlying. Equal time fractions use the
// closed form; distinct ones use the joint normal with rho = sqrt(min/max).
double option_cov_same_asset(const ReturnLeg& a, const ReturnLeg& b, double mu, double sigma);

struct UnderlyingLaw {
  double mu = 0.0;     // log mean per horizon
  double sigma = 0.0;  // log std per horizon
};

// Cov of two legs whose log changes (each over its own time span) are joint
// normal with correlation rho. Adaptive quadrature over the first leg with the
// conditional expectation of the second in closed form; throws
// QuadratureFailure when the error estimate misses tol relative to
// sqrt(Var a Var b).
double option_cov_cross_asset(const ReturnLeg& a, const UnderlyingLaw& la, const ReturnLeg& b,
                              const UnderlyingLaw& lb, double rho, double tol = 1e-9);

// Log correlation that reproduces simple-return correlation rho_simple for
// lognormal marginals with log standard deviations sa, sb.
double log_correlation(double rho_simple, double sa, double sb);

// Appends one row/column per option. Throws UnknownUnderlying,
// InvalidCorrelation.
MomentSet extend_universe(const MomentSet& ms, const std::vector<OptionSpec>& options,
                          double horizon_days);

}  // namespace cpoint

#endif  // CPOINT_MOMENTS_HPP_
