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

#ifndef KFTOMO_CONFIDENCE_H_
#define KFTOMO_CONFIDENCE_H_

#include <optional>
#include <utility>
#include <vector>

#include "kftomo/kalman.h"

namespace kftomo {

// (x~ - mu~)^* Sigma~^{-1} (x~ - mu~) with x~ = X1^*(vec(rho) - x0).
// Throws kOffSubspace if vec(rho) - x0 leaves range(T_X) by more than 1e-8.
double mahalanobis_sq(const GaussianState& state, const CMatrix& rho);
double mahalanobis_sq_vector(const GaussianState& state, const CVector& x);

struct ConfidenceReport {
  double m2 = 0.0;
  int nu = 0;
  double gamma = 0.0;
  bool inside = false;
  double gamma_phys = 0.0;
};

// gamma_phys = (sqrt(gamma) + m_ml)^2, or 4 gamma without m_ml.
// Note m_ml is the distance itself, not its square.
ConfidenceReport confidence_report(const GaussianState& state, const CMatrix& rho,
                                   bool conservative, std::optional<double> m_ml = std::nullopt);
double physical_gamma(double gamma, std::optional<double> m_ml);

struct ErrorBar {
  double mean = 0.0;
  double stddev = 0.0;
};

ErrorBar operator_error_bar(const GaussianState& state, const CMatrix& op);
// Same for an arbitrary linear functional a^* x of the state vector.
ErrorBar functional_error_bar(const GaussianState& state, const CVector& a);

// Eigenvalues of Sigma~, largest first.
RVector covariance_spectrum(const GaussianState& state);

// Contour {M^2 = gamma} of the posterior projected onto the plane of two
// observables, as points (<op1>, <op2>).
std::vector<std::pair<double, double>> slice_ellipse(const GaussianState& state,
                                                     const CMatrix& op1, const CMatrix& op2,
                                                     double gamma, int points = 100);
// Same, for real linear functionals x -> Re(a^* x).
std::vector<std::pair<double, double>> slice_ellipse_functional(const GaussianState& state,
                                                                const CVector& a1,
                                                                const CVector& a2, double gamma,
                                                                int points = 100);

}  // namespace kftomo

#endif  // KFTOMO_CONFIDENCE_H_
