// Copyright 2026 The cvnull Authors
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

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cvnull {

enum class ErrorCode {
  kInvalidDimension,
  kInvalidTransmissivity,
  kInvalidParameter,
  kInvalidVariance,
  kInvalidState,
  kNonHermitianOperator,
  kNonHermitianExpectation,
  kDimensionMismatch,
  kHeraldImpossible,
  kDegenerateAngles,
  kUnreachableMonomial,
  kIncreaseCutoff,
  kOptimizerFailed,
  kUnphysicalSpec,
  kGridTooSmall,
  kInsufficientData,
  kMissingAngle,
  kParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kInvalidTransmissivity: return "invalid-transmissivity";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kInvalidVariance: return "invalid-variance";
    case ErrorCode::kInvalidState: return "invalid-state";
    case ErrorCode::kNonHermitianOperator: return "non-hermitian-operator";
    case ErrorCode::kNonHermitianExpectation: return "non-hermitian-expectation";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kHeraldImpossible: return "herald-impossible";
    case ErrorCode::kDegenerateAngles: return "degenerate-angles";
    case ErrorCode::kUnreachableMonomial: return "unreachable-monomial";
    case ErrorCode::kIncreaseCutoff: return "increase-cutoff";
    case ErrorCode::kOptimizerFailed: return "optimizer-failed";
    case ErrorCode::kUnphysicalSpec: return "unphysical-spec";
    case ErrorCode::kGridTooSmall: return "grid-too-small";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kMissingAngle: return "missing-angle";
    case ErrorCode::kParseError: return "parse-error";
  }
  return "unknown";
}

/// Shortest readable form of a diagnostic number (%.6g).
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace cvnull
