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

#ifndef KFTOMO_IO_H_
#define KFTOMO_IO_H_

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kftomo/models.h"
#include "kftomo/repr.h"
#include "kftomo/stats.h"

namespace kftomo::io {

using Json = nlohmann::json;

inline constexpr const char* kDatasetFormat = "kftomo-dataset/1";
inline constexpr const char* kReportFormat = "kftomo-report/1";
inline constexpr const char* kSimSpecFormat = "kftomo-simspec/1";

// Malformed input. line/column are 1-based and zero when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset);

Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

// {"re": [[...]], "im": [[...]]}, row-major; "im" may be omitted.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, const std::string& where);
Json rmatrix_to_json(const RMatrix& m);
RMatrix rmatrix_from_json(const Json& j, const std::string& where);
// {"re": [...], "im": [...]}.
Json cvector_to_json(const CVector& v);
CVector cvector_from_json(const Json& j, const std::string& where);
Json rvector_to_json(const RVector& v);
RVector rvector_from_json(const Json& j, const std::string& where);

enum class ProblemKind { kState, kDiagonalPovm };

struct DatasetSetting {
  std::string name;
  std::vector<CMatrix> povm;  // state problems
  RVector probe_weights;      // diagonal-POVM problems
  OutcomeRecord record;
};

struct Dataset {
  ProblemKind problem = ProblemKind::kState;
  int dimension = 2;
  models::DiagonalFamily family;
  std::vector<DatasetSetting> settings;
  std::optional<CVector> truth;  // full state vector
  std::map<std::string, std::string> metadata;
};

Dataset parse_dataset(const Json& j);
Json dataset_to_json(const Dataset& d);
const char* problem_name(ProblemKind k);

}  // namespace kftomo::io

#endif  // KFTOMO_IO_H_
