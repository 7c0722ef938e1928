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

#ifndef KFTOMO_RESTRICT_H_
#define KFTOMO_RESTRICT_H_

#include <cmath>
#include <cstdint>

#include "kftomo/kalman.h"
#include "kftomo/physical.h"

namespace kftomo {

struct TruncatedNormal {
  double mu = 0.0;
  double sigma = 0.0;
};

// Normal with tail mass alpha below zero that best matches N(mu, sigma^2)
// truncated to [0, inf). Throws kNegativeDiscriminant on invalid input.
TruncatedNormal truncated_normal_approx(double mu, double sigma, double alpha0);

// A linear functional a^* x of the state, expressed in tilde coordinates.
struct Marginal {
  double mean = 0.0;
  double variance = 0.0;
  double ratio() const { return mean / std::sqrt(variance); }
};
Marginal marginal_of(const GaussianState& state, const CVector& a);

// Pseudo-measurement (z, theta) whose 1-D Kalman update moves the marginal
// from (mu, var) to (mu_t, sigma_t^2). kappa = 1 - sigma_t^2 / var.
struct PseudoMeasurement {
  double z = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};
PseudoMeasurement backprojection_measurement(double mu, double var, const TruncatedNormal& target);

// Replaces the marginal along `a` by its truncated-normal approximation.
// Throws kDegenerateMarginal if the marginal variance is <= 1e-14.
GaussianState marginal_restriction_step(const GaussianState& state, const CVector& a,
                                        double alpha0);

enum class Schedule { kFixedOrder, kSmallestFirst };

struct RestrictionResult {
  GaussianState state;
  CVector x_ml;
  double m2_ml = 0.0;
  int iterations = 0;  // marginal steps applied
  int sweeps = 0;      // full passes (orthant) or outer passes (PSD)
  bool converged = false;
  double min_ratio = 0.0;
};

struct RestrictOptions {
  Schedule schedule = Schedule::kFixedOrder;
  int max_sweeps = 200;
  int max_passes = 500;
  std::uint64_t seed = 0;
  bool with_maxlik = true;
};

// Iterative restriction to a^*_i x >= 0 for the orthant directions.
// Stops once min_i mu_i/sigma_i > (1 - epsilon) alpha0.
RestrictionResult restrict_orthant(const GaussianState& state, const PhysicalSetSpec& spec,
                                   const RestrictOptions& opts = {});

// Restriction to density matrices: inner orthant passes on the diagonal of
// U rho U^* for Haar-random U, with the U diagonalizing the current mean on
// the first and every fifth pass.
RestrictionResult restrict_psd(const GaussianState& state, const PhysicalSetSpec& spec,
                               const RestrictOptions& opts = {});

// Dispatches on the physical set kind.
RestrictionResult restrict_state(const GaussianState& state, const PhysicalSetSpec& spec,
                                 const RestrictOptions& opts = {});

}  // namespace kftomo

#endif  // KFTOMO_RESTRICT_H_
