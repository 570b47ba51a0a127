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

#include "cpoint/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cpoint/error.hpp"

namespace cpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEndpointTol = 1e-9;

std::size_t last_index(const Frontier& f) { return f.path.points.size() - 1; }

// Intercept at s = 0 of the tangent to segment seg at parameter l.
double tangent_intercept(const FrontierSegment& seg, double l) {
  const double v = seg.variance(l);
  const double dv = seg.dvariance(l);
  const double de = seg.e1 - seg.e0;
  if (!(dv > 0.0)) return de > 0.0 ? -kInf : kInf;
  return seg.ret(l) - 2.0 * v * de / dv;
}

// A segment along which the portfolio does not move; the path pauses at a
// vertex while only the multipliers change.
bool degenerate(const FrontierSegment& seg) {
  const double scale = 1.0 + std::abs(seg.e0) + std::abs(seg.v00);
  return std::abs(seg.e1 - seg.e0) <= 1e-14 * scale && std::abs(seg.v11 - seg.v00) <= 1e-14 * scale;
}

// Intercept just left and just right of critical point k, looking through
// degenerate segments.
double intercept_left(const Frontier& f, std::size_t k) {
  for (std::size_t j = std::min(k, f.segments.size()); j-- > 0;) {
    if (!degenerate(f.segments[j])) return tangent_intercept(f.segments[j], 1.0);
  }
  return -kInf;
}

double intercept_right(const Frontier& f, std::size_t k) {
  for (std::size_t j = k; j < f.segments.size(); ++j) {
    if (!degenerate(f.segments[j])) return tangent_intercept(f.segments[j], 0.0);
  }
  return f.path.points[k].ret;
}

PortfolioSelection make_selection(const Frontier& f, std::size_t k, double l, SelectBy by,
                                  double query) {
  const std::size_t last = last_index(f);
  if (k < last && l >= 1.0 - kEndpointTol) {
    ++k;
    l = 0.0;
  }
  if (l <= kEndpointTol) l = 0.0;
  PortfolioSelection s;
  s.by = by;
  s.query = query;
  s.k = k;
  s.l = l;
  s.names = f.path.names;
  const CriticalPoint& a = f.path.points[k];
  if (k == last) {
    s.weights = a.x;
    s.eta = a.eta;
    s.ret = a.ret;
    s.variance = a.variance;
  } else {
    const CriticalPoint& b = f.path.points[k + 1];
    const FrontierSegment& seg = f.segments[k];
    s.weights.resize(a.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) s.weights[i] = (1.0 - l) * a.x[i] + l * b.x[i];
    s.eta = seg.eta(l);
    s.ret = seg.ret(l);
    s.variance = seg.variance(l);
  }
  s.std = std::sqrt(std::max(s.variance, 0.0));
  if (f.segments.empty()) {
    s.rate = kNaN;
  } else if (k == last) {
    s.rate = intercept_left(f, k);
  } else if (degenerate(f.segments[k])) {
    s.rate = intercept_right(f, k);
  } else {
    s.rate = tangent_intercept(f.segments[k], l);
  }
  // eta = 0 is the minimum-variance portfolio, where the tangent is vertical.
  if (!f.segments.empty() && s.eta <= 0.0) s.rate = -kInf;
  s.status = l == 0.0 ? SelectionStatus::kCriticalPoint : SelectionStatus::kInterior;
  return s;
}

PortfolioSelection clamp(const Frontier& f, bool high, SelectBy by, double query) {
  PortfolioSelection s = make_selection(f, high ? last_index(f) : 0, 0.0, by, query);
  s.status = high ? SelectionStatus::kOutOfRangeHigh : SelectionStatus::kOutOfRangeLow;
  return s;
}

PortfolioSelection select_eta(const Frontier& f, double eta) {
  const auto& pts = f.path.points;
  const std::size_t last = last_index(f);
  if (eta < pts.front().eta - 1e-12) return clamp(f, false, SelectBy::kEta, eta);
  if (eta > pts[last].eta) {
    if (!f.path.open_ended) return clamp(f, true, SelectBy::kEta, eta);
    PortfolioSelection s = make_selection(f, last, 0.0, SelectBy::kEta, eta);
    if (!f.path.tail.empty() && norm_inf(f.path.tail) > 0.0) {
      // Extrapolate along the terminal ray.
      const CriticalPoint& a = pts[last];
      const double d = eta - a.eta;
      for (std::size_t i = 0; i < s.weights.size(); ++i) s.weights[i] = a.x[i] + d * f.path.tail[i];
      s.status = SelectionStatus::kInterior;
    }
    s.eta = eta;
    return s;
  }
  for (std::size_t k = 0; k < f.segments.size(); ++k) {
    const FrontierSegment& seg = f.segments[k];
    if (eta <= seg.eta1) {
      const double width = seg.eta1 - seg.eta0;
      const double l = width > 0.0 ? std::clamp((eta - seg.eta0) / width, 0.0, 1.0) : 0.0;
      PortfolioSelection s = make_selection(f, k, l, SelectBy::kEta, eta);
      s.eta = eta;
      return s;
    }
  }
  PortfolioSelection s = make_selection(f, last, 0.0, SelectBy::kEta, eta);
  s.eta = eta;
  return s;
}

PortfolioSelection select_return(const Frontier& f, double e) {
  const double tol = 1e-12 * (1.0 + std::abs(e));
  if (e < f.min_return() - tol) return clamp(f, false, SelectBy::kReturn, e);
  if (e > f.max_return() + tol) return clamp(f, true, SelectBy::kReturn, e);
  for (std::size_t k = 0; k < f.segments.size(); ++k) {
    const FrontierSegment& seg = f.segments[k];
    if (e <= seg.e1 + tol && seg.e1 > seg.e0) {
      const double l = std::clamp((e - seg.e0) / (seg.e1 - seg.e0), 0.0, 1.0);
      return make_selection(f, k, l, SelectBy::kReturn, e);
    }
  }
  // One-point frontier or a flat tail.
  for (std::size_t k = 0; k <= last_index(f); ++k) {
    if (std::abs(f.path.points[k].ret - e) <= tol) {
      return make_selection(f, k, 0.0, SelectBy::kReturn, e);
    }
  }
  return clamp(f, true, SelectBy::kReturn, e);
}

PortfolioSelection select_std(const Frontier& f, double sd) {
  const double v = sd * sd;
  const double tol = 1e-12 * (1.0 + v);
  if (sd < 0.0 || v < f.path.points.front().variance - tol) {
    return clamp(f, false, SelectBy::kStd, sd);
  }
  if (v > f.path.points.back().variance + tol) return clamp(f, true, SelectBy::kStd, sd);
  // Walk from the top so that the branch with the larger return wins.
  for (std::size_t kk = f.segments.size(); kk-- > 0;) {
    const FrontierSegment& seg = f.segments[kk];
    const double lo = std::min(seg.v00, seg.v11);
    const double hi = std::max(seg.v00, seg.v11);
    if (v < lo - tol || v > hi + tol) continue;
    const double a = seg.v00 - 2.0 * seg.v01 + seg.v11;
    const double b = 2.0 * (seg.v01 - seg.v00);
    const double c = seg.v00 - v;
    std::vector<double> roots;
    if (std::abs(a) <= 1e-14 * (std::abs(b) + std::abs(c) + 1e-300)) {
      if (b != 0.0) roots.push_back(-c / b);
    } else {
      const double disc = std::max(b * b - 4.0 * a * c, 0.0);
      const double sq = std::sqrt(disc);
      // Stable quadratic roots.
      const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      if (qq != 0.0) {
        roots.push_back(qq / a);
        roots.push_back(c / qq);
      } else {
        roots.push_back(0.0);
      }
    }
    std::optional<double> best;
    int inside = 0;
    for (double r : roots) {
      if (r < -1e-9 || r > 1.0 + 1e-9) continue;
      ++inside;
      r = std::clamp(r, 0.0, 1.0);
      if (!best || seg.ret(r) > seg.ret(*best)) best = r;
    }
    if (inside == 2 && seg.e1 == seg.e0 && std::abs(roots[0] - roots[1]) > 1e-9) {
      throw Error(ErrorCode::kAmbiguousQuery, "two portfolios share this standard deviation and return");
    }
    if (best) return make_selection(f, kk, *best, SelectBy::kStd, sd);
  }
  for (std::size_t k = 0; k <= last_index(f); ++k) {
    if (std::abs(f.path.points[k].variance - v) <= tol) {
      return make_selection(f, k, 0.0, SelectBy::kStd, sd);
    }
  }
  return clamp(f, true, SelectBy::kStd, sd);
}

}  // namespace

double Frontier::min_return() const { return path.points.front().ret; }
double Frontier::max_return() const { return path.points.back().ret; }
double Frontier::min_std() const { return std::sqrt(path.points.front().variance); }
double Frontier::max_std() const { return std::sqrt(path.points.back().variance); }

Frontier build_frontier(CriticalPath path) {
  if (path.points.empty()) throw Error(ErrorCode::kInvalidArgument, "empty critical path");
  if (path.cross.size() + 1 != path.points.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "critical path cross terms missing");
  }
  Frontier f;
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const CriticalPoint& a = path.points[k];
    const CriticalPoint& b = path.points[k + 1];
    f.segments.push_back({k, a.eta, b.eta, a.ret, b.ret, a.variance, path.cross[k], b.variance});
  }
  f.path = std::move(path);
  return f;
}

std::string_view select_by_name(SelectBy by) {
  switch (by) {
    case SelectBy::kEta: return "eta";
    case SelectBy::kReturn: return "e";
    case SelectBy::kStd: return "s";
    case SelectBy::kRate: return "r";
  }
  return "eta";
}

SelectBy parse_select_by(std::string_view text) {
  if (text == "eta") return SelectBy::kEta;
  if (text == "e" || text == "esp" || text == "return") return SelectBy::kReturn;
  if (text == "s" || text == "std") return SelectBy::kStd;
  if (text == "r" || text == "rate") return SelectBy::kRate;
  throw Error(ErrorCode::kInvalidArgument, "unknown selection key '" + std::string(text) + "'");
}

std::string_view status_name(SelectionStatus s) {
  switch (s) {
    case SelectionStatus::kNotComputed: return "NotComputed";
    case SelectionStatus::kCriticalPoint: return "CriticalPoint";
    case SelectionStatus::kInterior: return "Interior";
    case SelectionStatus::kOutOfRangeHigh: return "OutOfRangeHigh";
    case SelectionStatus::kOutOfRangeLow: return "OutOfRangeLow";
  }
  return "NotComputed";
}

PortfolioSelection tangency(const Frontier& f, double r) {
  const std::size_t last = last_index(f);
  if (!(r < f.path.points[last].ret)) {
    throw Error(ErrorCode::kRateAboveFrontier,
                "rate is not below the largest frontier return");
  }
  for (std::size_t k = 0; k <= last; ++k) {
    if (r >= intercept_left(f, k) && r <= intercept_right(f, k)) {
      // A kink: every rate in the interval is tangent here.
      PortfolioSelection s = make_selection(f, k, 0.0, SelectBy::kRate, r);
      s.rate = r;
      return s;
    }
    if (k < f.segments.size() && !degenerate(f.segments[k]) && r > intercept_right(f, k) &&
        r < intercept_left(f, k + 1)) {
      const FrontierSegment& seg = f.segments[k];
      double lo = 0.0, hi = 1.0, l = 0.5;
      for (int it = 0; it < 200; ++it) {
        l = 0.5 * (lo + hi);
        const double s = std::sqrt(seg.variance(l));
        const double ds = seg.dvariance(l) / (2.0 * s);
        const double h = (seg.e1 - seg.e0) / ds - (seg.ret(l) - r) / s;
        if (std::abs(h) <= 1e-10 || hi - lo < 1e-16) break;
        // The intercept rises with l, so h falls.
        if (h > 0.0) lo = l; else hi = l;
      }
      return make_selection(f, k, l, SelectBy::kRate, r);
    }
  }
  // Numerical gaps between adjacent intervals; take the nearest point.
  std::size_t best = 0;
  double gap = kInf;
  for (std::size_t k = 0; k <= last; ++k) {
    const double d = std::min(std::abs(r - intercept_left(f, k)), std::abs(r - intercept_right(f, k)));
    if (d < gap) {
      gap = d;
      best = k;
    }
  }
  PortfolioSelection s = make_selection(f, best, 0.0, SelectBy::kRate, r);
  s.rate = r;
  return s;
}

PortfolioSelection select(const Frontier& f, SelectBy by, double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kInvalidArgument, "selection value must be finite");
  switch (by) {
    case SelectBy::kEta: return select_eta(f, value);
    case SelectBy::kReturn: return select_return(f, value);
    case SelectBy::kStd: return select_std(f, value);
    case SelectBy::kRate:
      if (!(value < f.max_return())) return clamp(f, true, SelectBy::kRate, value);
      return tangency(f, value);
  }
  return {};
}

BrennanFrontier::BrennanFrontier(const Frontier& frontier, double r_lend, double r_borrow)
    : frontier_(&frontier), r_lend_(r_lend), r_borrow_(r_borrow) {
  if (r_lend > r_borrow) {
    throw Error(ErrorCode::kInvalidArgument, "lending rate exceeds borrowing rate");
  }
  lend_ = tangency(frontier, r_lend);
  borrow_ = tangency(frontier, r_borrow);
}

double BrennanFrontier::ret_at_std(double s) const {
  if (s <= lend_.std) return r_lend_ + (lend_.ret - r_lend_) / lend_.std * s;
  if (s >= borrow_.std) return r_borrow_ + (borrow_.ret - r_borrow_) / borrow_.std * s;
  return select(*frontier_, SelectBy::kStd, s).ret;
}

BrennanFrontier brennan_frontier(const Frontier& frontier, double r_lend, double r_borrow) {
  return BrennanFrontier(frontier, r_lend, r_borrow);
}

Vector capm_expected_returns(const Matrix& cov, std::span<const double> market, double r0,
                             double e_market) {
  if (cov.rows() != market.size() || cov.cols() != market.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "market weights must match the covariance");
  }
  const Vector sim = cov * market;
  const double smm = dot(market, sim);
  if (!(smm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "market portfolio has zero variance");
  Vector e(sim.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = r0 + (e_market - r0) * sim[i] / smm;
  return e;
}

Vector apt_expected_returns(const Matrix& loadings, double l0, std::span<const double> premia) {
  if (loadings.cols() != premia.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "factor premia must match loading columns");
  }
  Vector e = loadings * premia;
  for (double& v : e) v += l0;
  return e;
}

std::string format_report_number(double v, int decimals) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*E", decimals, v);
  std::string s(buf);
  std::replace(s.begin(), s.end(), '.', ',');
  return s;
}

std::string render_report(const std::vector<PortfolioSelection>& selections,
                          const ReportOptions& options) {
  std::ostringstream out;
  out << "Selected Portfolios: Parameters, Assets and Composition\n";
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  for (std::size_t i = 0; i < selections.size(); ++i) {
    const PortfolioSelection& s = selections[i];
    const std::string label =
        i < 26 ? std::string(1, static_cast<char>('A' + i)) : std::to_string(i + 1);
    const int d = options.parameter_decimals;
    out << "\nParameters of portfolio " << label << "\n";
    out << pad("eta", 12) << pad("esp", 12) << pad("var", 12) << pad("std", 12) << pad("rate", 12)
        << pad("k", 6) << "l\n";
    out << pad(format_report_number(s.eta, d), 12) << pad(format_report_number(s.ret, d), 12)
        << pad(format_report_number(s.variance, d), 12) << pad(format_report_number(s.std, d), 12)
        << pad(format_report_number(s.rate, d), 12) << pad(std::to_string(s.k), 6)
        << format_report_number(s.l, d) << "\n";
    out << "\nAssets and Composition of portfolio " << label << "\n";
    std::size_t on_line = 0;
    std::string line;
    for (std::size_t j = 0; j < s.weights.size(); ++j) {
      if (std::abs(s.weights[j]) <= options.weight_cutoff) continue;
      if (on_line > 0) line += "  ";
      line += format_report_number(s.weights[j], options.weight_decimals) + "@" + s.names[j];
      if (++on_line == options.weights_per_line) {
        out << line << "\n";
        line.clear();
        on_line = 0;
      }
    }
    if (!line.empty()) out << line << "\n";
  }
  return out.str();
}

std::vector<std::vector<std::pair<std::string, double>>> parse_report_compositions(
    std::string_view report) {
  std::vector<std::vector<std::pair<std::string, double>>> out;
  std::istringstream in{std::string(report)};
  std::string line;
  bool in_block = false;
  while (std::getline(in, line)) {
    if (line.rfind("Assets and Composition of portfolio", 0) == 0) {
      out.emplace_back();
      in_block = true;
      continue;
    }
    if (line.empty() || line.rfind("Parameters of portfolio", 0) == 0) {
      in_block = false;
      continue;
    }
    if (!in_block) continue;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const auto at = tok.find('@');
      if (at == std::string::npos) {
        throw Error(ErrorCode::kFormatError, "composition entry without '@': " + tok);
      }
      std::string num = tok.substr(0, at);
      std::replace(num.begin(), num.end(), ',', '.');
      out.back().emplace_back(tok.substr(at + 1), std::stod(num));
    }
  }
  return out;
}

}  // namespace cpoint
