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

// Command-line front end: simulate, reconstruct, restrict, regularize, report.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "kftomo/error.h"
#include "kftomo/io.h"
#include "kftomo/pipeline.h"

namespace {

namespace fs = std::filesystem;
namespace pl = kftomo::pipeline;
using kftomo::io::Json;

struct Outcome {
  int code = pl::kExitOk;
  std::string message;
};

std::string stem_of(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (const char* suffix : {".json", ".report", ".dataset", ".simspec", ".spec"}) {
    const std::string s(suffix);
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
      name.resize(name.size() - s.size());
    }
  }
  return (fs::path(path).parent_path() / name).string();
}

// Runs one input; every failure is mapped onto the exit-code contract.
Outcome guarded(const std::string& input, const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const kftomo::io::ParseError& e) {
    return {pl::kExitParse, e.what()};
  } catch (const Json::exception& e) {
    return {pl::kExitParse, std::string("malformed document: ") + e.what()};
  } catch (const pl::MissingStage& e) {
    return {pl::kExitEmptyRegion, e.what()};
  } catch (const kftomo::Error& e) {
    if (e.code() == kftomo::ErrorCode::kEmptyRegion) {
      return {pl::kExitEmptyRegion, std::string(e.what()) +
                                        "; the physical confidence region is empty, "
                                        "check the restrict diagnostic"};
    }
    return {pl::kExitNumeric, e.what()};
  } catch (const std::exception& e) {
    return {pl::kExitNumeric, input + ": " + e.what()};
  }
}

int fan_out(const std::vector<std::string>& inputs, int jobs,
            const std::function<Outcome(const std::string&)>& body) {
  std::vector<Outcome> results(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      results[i] = guarded(inputs[i], [&] { return body(inputs[i]); });
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(inputs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int code = pl::kExitOk;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!results[i].message.empty()) std::cerr << "kftomo: " << inputs[i] << ": " << results[i].message << '\n';
    code = std::max(code, results[i].code);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kalman-filter quantum tomography with confidence regions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  bool conservative = false;
  std::string output;
  int jobs = 1;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_flag("--conservative", conservative, "Use the conservative confidence threshold");
  app.add_option("-o,--output", output, "Output path (single input only)");
  app.add_option("-j,--jobs", jobs, "Worker threads across input files")->check(CLI::PositiveNumber);

  std::vector<std::string> inputs;

  auto* sim = app.add_subcommand("simulate", "Write a synthetic dataset from a simulation spec");
  sim->add_option("spec", inputs, "Simulation spec files")->required()->check(CLI::ExistingFile);

  bool correct = false;
  std::optional<double> cap;
  auto* rec = app.add_subcommand("reconstruct", "Posterior mean and covariance from a dataset");
  rec->add_option("input", inputs, "Dataset or report files")->required()->check(CLI::ExistingFile);
  rec->add_flag("--correct-prior", correct, "Remove the dummy prior after filtering");
  rec->add_option("--variance-cap", cap, "Replace the dummy prior by one of this variance");

  std::string method = "simple";
  double epsilon = 0.003;
  auto* res = app.add_subcommand("restrict", "Maximum-likelihood diagnostic and physical restriction");
  res->add_option("report", inputs, "Report files")->required()->check(CLI::ExistingFile);
  res->add_option("--method", method, "simple or kalman")
      ->check(CLI::IsMember({"simple", "kalman"}))
      ->capture_default_str();
  res->add_option("--epsilon", epsilon, "Restriction tolerance")->capture_default_str();

  std::string cost = "smoothness";
  auto* reg = app.add_subcommand("regularize", "Minimum-cost state inside the physical confidence region");
  reg->add_option("report", inputs, "Report files")->required()->check(CLI::ExistingFile);
  reg->add_option("--cost", cost, "smoothness or entropy")
      ->check(CLI::IsMember({"smoothness", "entropy"}))
      ->capture_default_str();

  std::string slice;
  bool errorbars = false;
  int points = 100;
  auto* rep = app.add_subcommand("report", "CSV plot data from a report");
  rep->add_option("report", inputs, "Report files")->required()->check(CLI::ExistingFile);
  auto* slice_opt = rep->add_option("--slice", slice, "'auto' or 'i,j'");
  auto* bars_opt = rep->add_flag("--errorbars", errorbars, "Per-component mean and standard deviation");
  slice_opt->excludes(bars_opt);
  rep->add_option("--points", points, "Points per contour")->check(CLI::Range(8, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pl::kExitParse;
  }
  if (!output.empty() && inputs.size() > 1) {
    std::cerr << "kftomo: --output needs a single input\n";
    return pl::kExitParse;
  }
  if (rep->parsed() && slice.empty() && !errorbars) {
    std::cerr << "kftomo: report needs --slice or --errorbars\n";
    return pl::kExitParse;
  }

  pl::Options opts;
  opts.seed = seed;
  opts.conservative = conservative;
  opts.correct_prior = correct;
  opts.variance_cap = cap;
  opts.epsilon = epsilon;

  auto target = [&](const std::string& in, const std::string& suffix) {
    return output.empty() ? stem_of(in) + suffix : output;
  };

  if (sim->parsed()) {
    return fan_out(inputs, jobs, [&](const std::string& in) {
      const auto ds = pl::simulate(kftomo::io::read_json_file(in), seed);
      kftomo::io::write_json_file(target(in, ".dataset.json"), kftomo::io::dataset_to_json(ds));
      return Outcome{};
    });
  }
  if (rep->parsed()) {
    return fan_out(inputs, jobs, [&](const std::string& in) {
      const Json report = pl::load_report(kftomo::io::read_json_file(in), opts);
      if (errorbars) {
        kftomo::io::write_text_file(target(in, ".errorbars.csv"), pl::errorbars_csv(report));
      } else {
        kftomo::io::write_text_file(target(in, ".slice.csv"), pl::slice_csv(report, slice, points));
      }
      return Outcome{};
    });
  }

  // Pipeline stages: a report input is updated in place unless --output is given.
  return fan_out(inputs, jobs, [&](const std::string& in) {
    pl::Options local = opts;
    local.source = in;
    const Json raw = kftomo::io::read_json_file(in);
    const bool is_report = raw.contains("format") && raw.at("format") == kftomo::io::kReportFormat;
    Json report = pl::load_report(raw, local);
    const std::string dest = !output.empty() ? output : is_report ? in : stem_of(in) + ".report.json";
    pl::StageStatus st;
    if (rec->parsed()) {
      st = pl::reconstruct(report, local);
    } else if (res->parsed()) {
      st = pl::restrict(report, method == "kalman" ? pl::RestrictMethod::kKalman : pl::RestrictMethod::kSimple,
                        local);
    } else {
      st = pl::regularize(report, cost == "entropy" ? kftomo::CostKind::kNegEntropy : kftomo::CostKind::kSmoothness,
                          local);
    }
    kftomo::io::write_json_file(dest, report);
    return Outcome{st.exit_code, st.message};
  });
}
