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

#include "cpoint/error.hpp"

namespace cpoint {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularBasis: return "SingularBasis";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kCycleLimit: return "CycleLimit";
    case ErrorCode::kInfeasibleModel: return "InfeasibleModel";
    case ErrorCode::kNumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::kMissingQuote: return "MissingQuote";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kInvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::kUnknownUnderlying: return "UnknownUnderlying";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kLexError: return "LexError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownName: return "UnknownName";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kTypeError: return "TypeError";
    case ErrorCode::kUniverseViolation: return "UniverseViolation";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kMissingNormalConstraint: return "MissingNormalConstraint";
    case ErrorCode::kRateAboveFrontier: return "RateAboveFrontier";
    case ErrorCode::kAmbiguousQuery: return "AmbiguousQuery";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, SourcePos where)
    : std::runtime_error(message), code_(code), where_(where) {}

}  // namespace cpoint
