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

// Compiled model bundles shared by the command line tool and the HTTP
// service. A bundle is immutable once built; its id is a hash of the
// canonical model text, so the same inputs give the same id everywhere.

#ifndef CPOINT_SERVICE_BUNDLE_HPP_
#define CPOINT_SERVICE_BUNDLE_HPP_

#include <memory>
#include <string>
#include <vector>

#include "cpoint/frontier.hpp"
#include "cpoint/parametric_qp.hpp"

namespace cpoint::service {

struct ModelSources {
  std::string model;
  std::string moments;
  std::string correl;
  std::string deriv;           // optional derivatives block
  double horizon_days = 30.0;  // option expiries are measured against this
};

struct ModelBundle {
  std::string id;
  QpModel model;
  std::vector<std::string> log;  // output of print statements
  Frontier frontier;
  std::string created_at;  // UTC, ISO-8601; not part of the id
};

// moments + correl (+ deriv) -> QpModel. Throws cpoint::Error.
QpModel compile_sources(const ModelSources& sources, std::vector<std::string>* log = nullptr);

// 64-bit FNV-1a of the canonical model JSON, as 16 hex digits.
std::string bundle_id(const QpModel& model);

// Sweeps the model and spot-checks every critical point against the
// optimality conditions. Throws NumericalBreakdown when a point fails.
std::shared_ptr<const ModelBundle> make_bundle(QpModel model, std::vector<std::string> log = {});

}  // namespace cpoint::service

#endif  // CPOINT_SERVICE_BUNDLE_HPP_
