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

#ifndef CPOINT_MOMENT_SET_HPP_
#define CPOINT_MOMENT_SET_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cpoint/matrix.hpp"

namespace cpoint {

// Simple-return moments of a set of assets over one investment horizon.
// er and std are aligned with names; correl is the correlation of simple
// returns, unit diagonal.
struct MomentSet {
  std::vector<std::string> names;
  Vector er;
  Vector std;
  Matrix correl;

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  // Throws DimensionMismatch when the pieces disagree in size.
  void check_shape() const;
};

}  // namespace cpoint

#endif  // CPOINT_MOMENT_SET_HPP_
