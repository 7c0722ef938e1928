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

#ifndef KFTOMO_PIPELINE_H_
#define KFTOMO_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kftomo/io.h"
#include "kftomo/kalman.h"
#include "kftomo/physical.h"
#include "kftomo/regularize.h"

namespace kftomo::pipeline {

inline constexpr const char* kVersion = "0.1.0";

// Process exit codes shared by the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitOutsideRegion = 4;
inline constexpr int kExitEmptyRegion = 5;

// A stage was asked for before the stage it depends on.
class MissingStage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Problem {
  io::Dataset dataset;
  ConstraintsPtr constraints;
  PhysicalSetSpec spec;
  std::vector<MeasurementSetting> settings;
  std::vector<OutcomeRecord> records;
};

// Errors carry the index of the offending setting in their message.
Problem build_problem(const io::Dataset& dataset);

struct Options {
  std::uint64_t seed = 0;
  bool conservative = false;
  bool correct_prior = false;
  std::optional<double> variance_cap;
  double epsilon = 0.003;
  std::string source;  // input path, for provenance
};

struct StageStatus {
  int exit_code = kExitOk;
  bool skipped = false;  // stage already present
  std::string message;
};

enum class RestrictMethod { kSimple, kKalman };
const char* method_name(RestrictMethod m);
const char* cost_name(CostKind k);

// A fresh report holding the dataset; reconstruct fills in the posterior.
io::Json new_report(const io::Dataset& dataset, const Options& opts);
// Accepts either a dataset or an existing report.
io::Json load_report(const io::Json& j, const Options& opts);

StageStatus reconstruct(io::Json& report, const Options& opts);
StageStatus restrict(io::Json& report, RestrictMethod method, const Options& opts);
StageStatus regularize(io::Json& report, CostKind cost, const Options& opts);

// Rebuilt from the embedded dataset and the stored posterior moments.
Problem problem_of(const io::Json& report);
GaussianState posterior_of(const io::Json& report, const Problem& problem);

std::string errorbars_csv(const io::Json& report);
// `which` is "auto" or "i,j". For states the indices pick eigenvectors of the
// posterior mean in ascending eigenvalue order; for diagonal families they are
// flat component indices. auto takes the two smallest.
std::string slice_csv(const io::Json& report, const std::string& which, int points = 100);

// Synthetic dataset from a simulation spec (see FORMATS.md).
io::Dataset simulate(const io::Json& spec, std::uint64_t seed);

}  // namespace kftomo::pipeline

#endif  // KFTOMO_PIPELINE_H_
