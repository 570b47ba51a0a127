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

// Efficient frontier built from a critical path. Between consecutive
// critical points the efficient portfolio is x = (1-l) x_k + l x_{k+1}, so
// return is linear and variance quadratic in l.

#ifndef CPOINT_FRONTIER_HPP_
#define CPOINT_FRONTIER_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpoint/matrix.hpp"
#include "cpoint/parametric_qp.hpp"

namespace cpoint {

struct FrontierSegment {
  std::size_t k = 0;
  double eta0 = 0.0, eta1 = 0.0;
  double e0 = 0.0, e1 = 0.0;
  double v00 = 0.0, v01 = 0.0, v11 = 0.0;

  double ret(double l) const { return (1.0 - l) * e0 + l * e1; }
  double variance(double l) const {
    return (1.0 - l) * (1.0 - l) * v00 + 2.0 * l * (1.0 - l) * v01 + l * l * v11;
  }
  double eta(double l) const { return (1.0 - l) * eta0 + l * eta1; }
  // d variance / d l
  double dvariance(double l) const {
    return -2.0 * (1.0 - l) * v00 + 2.0 * (1.0 - 2.0 * l) * v01 + 2.0 * l * v11;
  }
};

struct Frontier {
  CriticalPath path;
  std::vector<FrontierSegment> segments;

  double min_return() const;
  double max_return() const;
  double min_std() const;
  double max_std() const;
};

Frontier build_frontier(CriticalPath path);

enum class SelectBy { kEta, kReturn, kStd, kRate };
enum class SelectionStatus { kNotComputed, kCriticalPoint, kInterior, kOutOfRangeHigh, kOutOfRangeLow };

std::string_view select_by_name(SelectBy by);
SelectBy parse_select_by(std::string_view text);  // eta|e|s|r; throws InvalidArgument
std::string_view status_name(SelectionStatus s);

struct PortfolioSelection {
  SelectBy by = SelectBy::kEta;
  double query = 0.0;
  double eta = 0.0;
  double ret = 0.0;
  double variance = 0.0;
  double std = 0.0;
  double rate = 0.0;  // intercept of the tangent at this point; NaN on a one-point frontier
  std::size_t k = 0;
  double l = 0.0;
  SelectionStatus status = SelectionStatus::kNotComputed;
  std::vector<std::string> names;
  Vector weights;
};

PortfolioSelection select(const Frontier& frontier, SelectBy by, double value);

// Tangency portfolio for a riskless rate r. Throws RateAboveFrontier when no
// tangent from (0, r) touches the frontier.
PortfolioSelection tangency(const Frontier& frontier, double r);

// Lending ray, frontier arc, borrowing ray.
class BrennanFrontier {
 public:
  BrennanFrontier(const Frontier& frontier, double r_lend, double r_borrow);

  const PortfolioSelection& lend_tangency() const { return lend_; }
  const PortfolioSelection& borrow_tangency() const { return borrow_; }
  double r_lend() const { return r_lend_; }
  double r_borrow() const { return r_borrow_; }
  // Return of the composite frontier at standard deviation s >= 0.
  double ret_at_std(double s) const;

 private:
  const Frontier* frontier_;
  double r_lend_;
  double r_borrow_;
  PortfolioSelection lend_;
  PortfolioSelection borrow_;
};

BrennanFrontier brennan_frontier(const Frontier& frontier, double r_lend, double r_borrow);

// e_i = r0 + (e_m - r0) sigma_im / sigma_mm for each asset given the market
// portfolio weights and the market's expected return.
Vector capm_expected_returns(const Matrix& cov, std::span<const double> market, double r0,
                             double e_market);
// E(r) = l0 1 + B l_{1..k}
Vector apt_expected_returns(const Matrix& loadings, double l0, std::span<const double> premia);

struct ReportOptions {
  int parameter_decimals = 2;
  int weight_decimals = 6;
  double weight_cutoff = 1e-10;
  std::size_t weights_per_line = 5;
};

// Mantissa with a comma decimal separator, e.g. 4,22E-01.
std::string format_report_number(double v, int decimals);
std::string render_report(const std::vector<PortfolioSelection>& selections,
                          const ReportOptions& options = {});
// Parses the composition blocks back into weight vectors keyed by name.
std::vector<std::vector<std::pair<std::string, double>>> parse_report_compositions(
    std::string_view report);

}  // namespace cpoint

#endif  // CPOINT_FRONTIER_HPP_
