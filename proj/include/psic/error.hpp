// Copyright 2026 The psicomplete Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psic {

enum class ErrorCode {
  DimensionTooSmall,
  DimensionMismatch,
  NotHermitian,
  NonFinite,
  NonConvergence,
  SingularOperator,
  RankTooHigh,
  InconsistentData,
  ZeroVector,
  NotGaugeFixed,
  KPhiTooLarge,
  NoNullVector,
  NotRankOne,
  InvalidCounterexample,
  InvalidArgument,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::RankTooHigh: return "RankTooHigh";
    case ErrorCode::InconsistentData: return "InconsistentData";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotGaugeFixed: return "NotGaugeFixed";
    case ErrorCode::KPhiTooLarge: return "KPhiTooLarge";
    case ErrorCode::NoNullVector: return "NoNullVector";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::InvalidCounterexample: return "InvalidCounterexample";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace psic
