// Copyright 2026 The kftomo Authors
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

#ifndef KFTOMO_ERROR_H_
#define KFTOMO_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace kftomo {

enum class ErrorCode {
  kNonSquareLength,
  kSingularCorrection,
  kNotAProjector,
  kBadReference,
  kDegenerateRange,
  kSingularInnovation,
  kNotCorrectable,
  kRankDeficient,
  kSingularGram,
  kElementNotPSD,
  kDimensionMismatch,
  kEmptyRecord,
  kOffSubspace,
  kNegativeDiscriminant,
  kDegenerateMarginal,
  kNoConvergence,
  kEmptyRegion,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }
  // The message without the code name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace kftomo

#endif  // KFTOMO_ERROR_H_
