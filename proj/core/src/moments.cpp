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

#include "cpoint/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpoint/error.hpp"
#include "cpoint/numerics.hpp"

namespace cpoint {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kFormatError, "not a number: '" + s + "'", {line, 1});
  }
  return v;
}

std::string fmt_sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::optional<std::size_t> MomentSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

void MomentSet::check_shape() const {
  const std::size_t n = names.size();
  if (er.size() != n || std.size() != n || correl.rows() != n || correl.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "moment set pieces disagree in size");
  }
}

Date parse_date(std::string_view text) {
  const std::string t = trim(text);
  int y = 0, m = 0, d = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(t);
  if (t.find('-') != std::string::npos) {
    in >> y >> c1 >> m >> c2 >> d;
    if (!in || c1 != '-' || c2 != '-' || !in.eof()) {
      throw Error(ErrorCode::kFormatError, "bad date '" + t + "'");
    }
  } else {
    in >> d >> c1 >> m >> c2 >> y;
    if (!in || c1 != '/' || c2 != '/' || !in.eof()) {
      throw Error(ErrorCode::kFormatError, "bad date '" + t + "'");
    }
    const std::size_t year_digits = t.size() - t.rfind('/') - 1;
    if (year_digits <= 2) y += y >= 50 ? 1900 : 2000;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorCode::kFormatError, "invalid calendar date '" + t + "'");
  return Date(ymd);
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

PriceSeries parse_price_series(std::string_view text) {
  PriceSeries ps;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '*') break;  // the terminator may carry a trailing note
    const auto colon = line.find(':');
    if (colon != std::string::npos) {
      const std::string key = trim(line.substr(0, colon));
      const std::string val = trim(line.substr(colon + 1));
      if (key == "Asset") {
        ps.asset = val;
      } else if (key == "Deflator") {
        ps.deflator = val;
      } else if (key == "Shares") {
        ps.shares = parse_double(val, line_no);
      } else {
        throw Error(ErrorCode::kFormatError, "unknown header '" + key + "'", {line_no, 1});
      }
      continue;
    }
    std::istringstream row(line);
    std::string date_tok, price_tok, extra;
    row >> date_tok >> price_tok;
    if (date_tok == "Date" || date_tok == "date") continue;
    if (price_tok.empty() || (row >> extra)) {
      throw Error(ErrorCode::kFormatError, "expected 'date price'", {line_no, 1});
    }
    Date d;
    try {
      d = parse_date(date_tok);
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormatError, e.what(), {line_no, 1});
    }
    const double p = parse_double(price_tok, line_no);
    if (!(p > 0.0)) throw Error(ErrorCode::kFormatError, "price must be positive", {line_no, 1});
    ps.observations.push_back({d, p});
  }
  if (ps.asset.empty()) throw Error(ErrorCode::kFormatError, "missing 'Asset:' header");
  std::sort(ps.observations.begin(), ps.observations.end(),
            [](const PriceObservation& a, const PriceObservation& b) { return a.date > b.date; });
  for (std::size_t i = 1; i < ps.observations.size(); ++i) {
    if (ps.observations[i].date == ps.observations[i - 1].date) {
      throw Error(ErrorCode::kFormatError,
                  "duplicate quote date " + format_date(ps.observations[i].date) + " for " + ps.asset);
    }
  }
  return ps;
}

PriceSeries read_price_series(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_price_series(ss.str());
}

double hurst_factor(double extrap, double hurst) { return std::pow(extrap, hurst); }

MomentPair to_simple(double log_mean, double log_std) {
  const double s2 = log_std * log_std;
  MomentPair r;
  r.mean = std::expm1(log_mean + 0.5 * s2);
  r.std = std::sqrt(std::exp(2.0 * log_mean + s2) * std::expm1(s2));
  return r;
}

MomentPair to_log(double er, double std) {
  if (!(er > -1.0) || !(std >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "simple moments outside the lognormal domain");
  }
  const double g = 1.0 + er;
  const double s2 = std::log1p((std / g) * (std / g));
  return {std::log(g) - 0.5 * s2, std::sqrt(s2)};
}

FilterResult filter_estimate(const std::vector<PriceSeries>& series, const FilterParams& params) {
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "no price series");
  if (params.interval_days <= 0) throw Error(ErrorCode::kInvalidArgument, "interval must be positive");
  if (params.samples < 2) {
    throw Error(ErrorCode::kInsufficientSamples, "at least two returns are required");
  }
  if (!(params.extrap > 0.0)) throw Error(ErrorCode::kInvalidArgument, "extrap must be positive");

  const std::size_t n = series.size();
  const std::size_t t = static_cast<std::size_t>(params.samples);
  FilterResult out;
  for (std::size_t j = 0; j <= t; ++j) {
    out.grid.push_back(params.final_date - std::chrono::days(static_cast<long>(j) * params.interval_days));
  }

  // r(i, j) = ln(P(t_j) / P(t_{j+1})), t_0 the final date.
  Matrix r(n, t);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obs = series[i].observations;
    std::vector<double> prices(t + 1);
    for (std::size_t j = 0; j <= t; ++j) {
      const Date when = out.grid[j];
      // First observation on or before `when` (observations descend by date).
      auto it = std::find_if(obs.begin(), obs.end(),
                             [when](const PriceObservation& o) { return o.date <= when; });
      const long limit = static_cast<long>(params.max_carry) * params.interval_days;
      if (it == obs.end() || (when - it->date).count() > limit) {
        throw Error(ErrorCode::kMissingQuote,
                    "no quote for " + series[i].asset + " near " + format_date(when));
      }
      prices[j] = it->price;
    }
    for (std::size_t j = 0; j < t; ++j) r(i, j) = std::log(prices[j] / prices[j + 1]);
  }

  const double inv = 1.0 / static_cast<double>(t);
  out.mean_log.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < t; ++j) out.mean_log[i] += r(i, j);
    out.mean_log[i] *= inv;
  }
  Matrix cov(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < t; ++j) s += (r(a, j) - out.mean_log[a]) * (r(b, j) - out.mean_log[b]);
      cov(a, b) = cov(b, a) = s * inv;
    }
  }
  out.std_log.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.std_log[i] = std::sqrt(cov(i, i));

  const double h = hurst_factor(params.extrap, params.hurst);
  out.horizon_mean.resize(n);
  out.horizon_std.resize(n);
  out.log_correl = Matrix(n, n);
  MomentSet& ms = out.simple;
  ms.names.resize(n);
  ms.er.resize(n);
  ms.std.resize(n);
  ms.correl = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    ms.names[i] = series[i].asset;
    out.horizon_mean[i] = params.extrap * out.mean_log[i];
    out.horizon_std[i] = h * out.std_log[i];
    const MomentPair sm = to_simple(out.horizon_mean[i], out.horizon_std[i]);
    ms.er[i] = sm.mean;
    ms.std[i] = sm.std;
  }
  for (std::size_t a = 0; a < n; ++a) {
    out.log_correl(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double den = out.std_log[a] * out.std_log[b];
      const double rho = den > 0.0 ? std::clamp(cov(a, b) / den, -1.0, 1.0) : 0.0;
      out.log_correl(a, b) = out.log_correl(b, a) = rho;
      // Correlation of the simple horizon returns under the lognormal law.
      const double sa = out.horizon_std[a];
      const double sb = out.horizon_std[b];
      const double dd = std::sqrt(std::expm1(sa * sa) * std::expm1(sb * sb));
      const double rs = dd > 0.0 ? std::expm1(rho * sa * sb) / dd : 0.0;
      ms.correl(a, b) = ms.correl(b, a) = std::clamp(rs, -1.0, 1.0);
    }
  }
  return out;
}

std::string CorrelationReport::describe() const {
  std::ostringstream o;
  for (const auto& v : violations) {
    switch (v.kind) {
      case CorrelationViolation::Kind::kDiagonal: o << "diagonal(" << v.i << ")=" << v.value; break;
      case CorrelationViolation::Kind::kDominance:
        o << "|c(" << v.i << "," << v.j << ")|=" << std::abs(v.value) << ">1";
        break;
      case CorrelationViolation::Kind::kSymmetry: o << "asymmetric(" << v.i << "," << v.j << ")"; break;
      case CorrelationViolation::Kind::kPositivity: o << "not positive semidefinite"; break;
      case CorrelationViolation::Kind::kShape: o << "not square"; break;
    }
    o << "; ";
  }
  return o.str();
}

CorrelationReport validate_correlation(const Matrix& c) {
  using Kind = CorrelationViolation::Kind;
  CorrelationReport rep;
  if (c.rows() != c.cols()) {
    rep.violations.push_back({Kind::kShape, c.rows(), c.cols(), 0.0});
    return rep;
  }
  const std::size_t n = c.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(c(i, i) - 1.0) <= 1e-12)) rep.violations.push_back({Kind::kDiagonal, i, i, c(i, i)});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(std::abs(c(i, j) - c(j, i)) <= 1e-10)) {
        rep.violations.push_back({Kind::kSymmetry, i, j, c(i, j) - c(j, i)});
      }
      if (!(std::abs(c(i, j)) <= 1.0 + 1e-12)) rep.violations.push_back({Kind::kDominance, i, j, c(i, j)});
    }
  }
  if (rep.ok() && n > 0) {
    Matrix shifted = c;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += 1e-8;
    try {
      (void)cholesky(shifted, 0.0);
    } catch (const Error&) {
      rep.violations.push_back({Kind::kPositivity, 0, 0, 0.0});
    }
  }
  return rep;
}

Matrix covariance_from_corr(const MomentSet& ms) {
  ms.check_shape();
  const CorrelationReport rep = validate_correlation(ms.correl);
  if (!rep.ok()) throw Error(ErrorCode::kInvalidCorrelation, "invalid correlation: " + rep.describe());
  const std::size_t n = ms.size();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = ms.std[i] * ms.std[j] * ms.correl(i, j);
  return s;
}

NamedMatrix parse_correlation(std::string_view text) {
  NamedMatrix out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::vector<Vector> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    std::istringstream tok(line);
    std::string w;
    if (out.names.empty()) {
      while (tok >> w) out.names.push_back(w);
      continue;
    }
    Vector row;
    while (tok >> w) row.push_back(parse_double(w, line_no));
    if (row.size() != out.names.size()) {
      throw Error(ErrorCode::kFormatError, "correlation row has the wrong length", {line_no, 1});
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != out.names.size()) {
    throw Error(ErrorCode::kFormatError, "correlation file needs one row per asset");
  }
  out.values = rows.empty() ? Matrix() : Matrix::from_rows(rows);
  return out;
}

std::string write_correlation(const std::vector<std::string>& names, const Matrix& correl) {
  std::ostringstream o;
  for (std::size_t i = 0; i < names.size(); ++i) o << (i ? " " : "") << names[i];
  o << "\n";
  for (std::size_t i = 0; i < correl.rows(); ++i) {
    for (std::size_t j = 0; j < correl.cols(); ++j) o << (j ? " " : "") << fmt_sci(correl(i, j));
    o << "\n";
  }
  return o.str();
}

std::string write_moments(const MomentSet& ms, const std::map<std::string, double>& scalars) {
  std::ostringstream o;
  auto vec = [&](const std::string& name, const Vector& v) {
    o << name << "[all]={";
    for (std::size_t i = 0; i < ms.size(); ++i) {
      o << (i ? ", " : "") << fmt_sci(v[i]) << "@" << ms.names[i];
    }
    o << "};\n";
  };
  o << "all={";
  for (std::size_t i = 0; i < ms.size(); ++i) o << (i ? ", " : "") << ms.names[i];
  o << "};\n";
  vec("er", ms.er);
  vec("std", ms.std);
  for (const auto& [k, v] : scalars) o << k << "=" << fmt_sci(v) << ";\n";
  return o.str();
}

MomentPair portfolio_moments(const MomentSet& ms, const std::map<std::string, double>& weights) {
  const Matrix s = covariance_from_corr(ms);
  Vector w(ms.size(), 0.0);
  for (const auto& [name, wt] : weights) {
    const auto idx = ms.index_of(name);
    if (!idx) throw Error(ErrorCode::kUnknownName, "asset '" + name + "' is not in the moment set");
    w[*idx] = wt;
  }
  return {dot(w, ms.er), std::sqrt(std::max(quadratic_form(s, w, w), 0.0))};
}

IndexMoments index_model_moments(const IndexModel& m) {
  const std::size_t n = m.mean_a.size();
  const std::size_t k = m.mean_c.size();
  if (m.var_a.size() != n || m.loadings.rows() != n || m.loadings.cols() != k ||
      m.cov_c.rows() != k || m.cov_c.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "index model shapes disagree");
  }
  IndexMoments out;
  out.er = m.loadings * m.mean_c;
  for (std::size_t i = 0; i < n; ++i) out.er[i] += m.mean_a[i];
  out.cov = m.loadings * m.cov_c * m.loadings.transpose();
  for (std::size_t i = 0; i < n; ++i) out.cov(i, i) += m.var_a[i];
  return out;
}

IndexModel diagonalize(const IndexModel& m) {
  const Matrix l = cholesky(m.cov_c);
  IndexModel d = m;
  d.loadings = m.loadings * l;
  d.mean_c = solve_lower(l, m.mean_c);
  d.cov_c = Matrix::identity(m.mean_c.size());
  return d;
}

}  // namespace cpoint
