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

#include "cpoint/service/bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "cpoint/error.hpp"
#include "cpoint/mdl/compiler.hpp"
#include "cpoint/moments.hpp"
#include "cpoint/service/json_io.hpp"

namespace cpoint::service {

namespace {

// Scaled so that models quoted in percent pass as readily as fractions.
constexpr double kKktTolerance = 1e-6;

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd(day);
  const std::chrono::hh_mm_ss hms(now - day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

double model_scale(const QpModel& m) {
  double s = 1.0;
  for (double v : m.q.data()) s = std::max(s, std::abs(v));
  for (double v : m.p) s = std::max(s, std::abs(v));
  for (double v : m.eq_rhs) s = std::max(s, std::abs(v));
  for (double v : m.ineq_rhs) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

QpModel compile_sources(const ModelSources& src, std::vector<std::string>* log) {
  MomentSet ms = mdl::load_moments(src.moments, src.correl);
  if (!blank(src.deriv)) ms = extend_universe(ms, mdl::parse_deriv(src.deriv), src.horizon_days);
  mdl::CompiledModel cm = mdl::compile(src.model, ms);
  if (log) *log = std::move(cm.log);
  return std::move(cm.model);
}

std::string bundle_id(const QpModel& model) {
  const std::string text = model_json(model);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const ModelBundle> make_bundle(QpModel model, std::vector<std::string> log) {
  model.validate();
  auto b = std::make_shared<ModelBundle>();
  b->id = bundle_id(model);
  b->frontier = build_frontier(sweep(model));
  const double tol = kKktTolerance * model_scale(model);
  for (const CriticalPoint& c : b->frontier.path.points) {
    const KktResidual r = kkt_residual(model, c.eta, c.x, c.s, c.l, c.e);
    if (!(r.max() <= tol * std::max(1.0, c.eta))) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "critical point at eta=%.6g fails the optimality check (%.3g)", c.eta,
                    r.max());
      throw Error(ErrorCode::kNumericalBreakdown, buf);
    }
  }
  b->model = std::move(model);
  b->log = std::move(log);
  b->created_at = utc_now();
  return b;
}

}  // namespace cpoint::service
