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

// JSON documents of the public interface. Every number is written with 17
// significant digits so that parsing returns the exact double, and the same
// object always produces the same bytes.

#ifndef CPOINT_SERVICE_JSON_IO_HPP_
#define CPOINT_SERVICE_JSON_IO_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cpoint/error.hpp"
#include "cpoint/frontier.hpp"
#include "cpoint/parametric_qp.hpp"
#include "cpoint/service/bundle.hpp"

namespace cpoint::service {

std::string model_json(const QpModel& model);
QpModel parse_model_json(std::string_view text);

// The on-disk bundle: format tag, id, model and log. Loading re-derives the
// frontier and rejects a file whose id does not match its model.
std::string bundle_file(const ModelBundle& bundle);
std::shared_ptr<const ModelBundle> load_bundle_file(std::string_view text);

std::string frontier_json(const ModelBundle& bundle);

// The selection with its report text block.
std::string selection_json(const PortfolioSelection& selection);

// {"code": "...", "message": "...", "line": n, "column": n}
std::string error_json(const Error& error);
std::string error_json(std::string_view code, std::string_view message);

struct SelectRequest {
  SelectBy by = SelectBy::kEta;
  double value = 0.0;
  bool strict = false;  // out-of-range queries become errors
};

// Throws InvalidArgument or FormatError.
SelectRequest parse_select_request(std::string_view text);

// Returns OutOfRange when the request is strict and the selection was clamped.
std::optional<Error> strict_violation(const SelectRequest& request, const PortfolioSelection& selection);

// The selection both front ends serve; throws the strict violation.
PortfolioSelection run_select(const ModelBundle& bundle, const SelectRequest& request);

}  // namespace cpoint::service

#endif  // CPOINT_SERVICE_JSON_IO_HPP_
