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

#include "kftomo/error.h"

namespace kftomo {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonSquareLength: return "NonSquareLength";
    case ErrorCode::kSingularCorrection: return "SingularCorrection";
    case ErrorCode::kNotAProjector: return "NotAProjector";
    case ErrorCode::kBadReference: return "BadReference";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kSingularInnovation: return "SingularInnovation";
    case ErrorCode::kNotCorrectable: return "NotCorrectable";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kElementNotPSD: return "ElementNotPSD";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyRecord: return "EmptyRecord";
    case ErrorCode::kOffSubspace: return "OffSubspace";
    case ErrorCode::kNegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::kDegenerateMarginal: return "DegenerateMarginal";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}

}  // namespace kftomo
