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

#ifndef FAIRALLOC_ERROR_HPP
#define FAIRALLOC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairalloc {

enum class ErrorCode {
  // domain validation
  ZeroPopulationRegion,
  MissingRate,
  NegativeCount,
  ZeroExposedRegion,
  NegativeBudget,
  RateOutOfRange,
  DuplicateRegion,
  DuplicateGroup,
  UnknownRegion,
  UnknownGroup,
  DimensionMismatch,
  // exposure estimation
  ZeroGroupProbability,
  RateExceedsOne,
  // optimisation
  AlphaOutOfRange,
  StatusNotOptimal,
  IterationLimitExceeded,
  BudgetUnreachable,
  TunerInfeasible,
  // io
  ParseError,
  NegativeCell,
  IoError,
  InvalidArgument,
  Internal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroPopulationRegion: return "ZeroPopulationRegion";
    case ErrorCode::MissingRate: return "MissingRate";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::ZeroExposedRegion: return "ZeroExposedRegion";
    case ErrorCode::NegativeBudget: return "NegativeBudget";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::DuplicateRegion: return "DuplicateRegion";
    case ErrorCode::DuplicateGroup: return "DuplicateGroup";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroGroupProbability: return "ZeroGroupProbability";
    case ErrorCode::RateExceedsOne: return "RateExceedsOne";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::StatusNotOptimal: return "StatusNotOptimal";
    case ErrorCode::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorCode::BudgetUnreachable: return "BudgetUnreachable";
    case ErrorCode::TunerInfeasible: return "TunerInfeasible";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeCell: return "NegativeCell";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairalloc

#endif  // FAIRALLOC_ERROR_HPP
