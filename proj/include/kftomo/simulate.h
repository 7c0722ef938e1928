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

#ifndef KFTOMO_SIMULATE_H_
#define KFTOMO_SIMULATE_H_

#include <cstdint>
#include <vector>

#include "kftomo/kalman.h"
#include "kftomo/rng.h"

namespace kftomo {

// p_k = Tr[rho Pi_k].
RVector born_probabilities(const CMatrix& rho, const std::vector<CMatrix>& povm);
// Same through a measurement matrix: Re(h x).
RVector born_probabilities(const CVector& x, const MeasurementSetting& setting);

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng);
std::int64_t sample_poisson(double mean, Rng& rng);

// Multinomial counts; p is normalized internally so scaled POVMs are accepted.
OutcomeRecord sample_pulsed(const RVector& p, std::int64_t n, Rng& rng);
// Independent Poisson counts with means brightness * p_k.
OutcomeRecord sample_cw(const RVector& p, double brightness, Rng& rng);

struct TrueModel {
  CVector x_true;
  std::vector<MeasurementSetting> settings;
  Mode mode = Mode::kPulsed;
  std::int64_t runs = 1000;    // pulsed runs per setting
  double brightness = 1000.0;  // CW count scale per setting
};

struct CoverageResult {
  double coverage = 0.0;  // NaN when there were no trials
  bool empty = true;
  double gamma = 0.0;
  std::vector<double> m2;
};

// Reconstructs `trials` simulated datasets with an infinitely wide prior and
// records the squared Mahalanobis distance of the true state. Trial i draws
// from the stream (seed, i), so the result does not depend on `jobs`.
CoverageResult coverage_experiment(ConstraintsPtr constraints, const TrueModel& model, int trials,
                                   std::uint64_t seed, bool conservative = false, int jobs = 1);

}  // namespace kftomo

#endif  // KFTOMO_SIMULATE_H_
