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

#ifndef CPOINT_ERROR_HPP_
#define CPOINT_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpoint {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kSingularBasis,
  kNotPositiveDefinite,
  kCycleLimit,
  kInfeasibleModel,
  kNumericalBreakdown,
  kMissingQuote,
  kInsufficientSamples,
  kInvalidCorrelation,
  kUnknownUnderlying,
  kQuadratureFailure,
  kLexError,
  kParseError,
  kUnknownName,
  kDuplicateName,
  kTypeError,
  kUniverseViolation,
  kDivisionByZero,
  kMissingNormalConstraint,
  kRateAboveFrontier,
  kAmbiguousQuery,
  kOutOfRange,
  kIoError,
  kFormatError,
  kNotFound,
};

// Stable identifier used in logs, JSON error bodies and CLI output.
std::string_view error_code_name(ErrorCode code);

struct SourcePos {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourcePos where);

  ErrorCode code() const { return code_; }
  const std::optional<SourcePos>& where() const { return where_; }

 private:
  ErrorCode code_;
  std::optional<SourcePos> where_;
};

}  // namespace cpoint

#endif  // CPOINT_ERROR_HPP_
