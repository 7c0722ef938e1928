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

#ifndef KFTOMO_KALMAN_H_
#define KFTOMO_KALMAN_H_

#include <memory>
#include <vector>

#include "kftomo/repr.h"
#include "kftomo/stats.h"

namespace kftomo {

using ConstraintsPtr = std::shared_ptr<const ConstraintSubspaces>;

// One measurement setting. Row j of h is vec(Pi_j)^*, so h * vec(rho) holds
// the Born probabilities Tr[rho Pi_j].
struct MeasurementSetting {
  std::vector<CMatrix> povm;  // empty for settings built from a bare matrix
  CMatrix h;
  CMatrix h_tilde;
  MeasurementSubspaces meas;
  double m_min = 1.0;  // extremal eigenvalues of the element sum
  double m_max = 1.0;

  int d() const { return static_cast<int>(h.rows()); }
  // Elements sum to a multiple of the identity.
  bool scalar_complete() const { return m_max - m_min <= 1e-10 * m_max; }
};

// Throws kElementNotPSD or kDimensionMismatch.
MeasurementSetting build_setting(const std::vector<CMatrix>& povm, const ConstraintSubspaces& cs);
// Generic linear setting; m_min/m_max bound the total probability.
MeasurementSetting build_linear_setting(const CMatrix& h, const ConstraintSubspaces& cs,
                                        double m_min, double m_max);

struct GaussianState {
  CVector mu_tilde;
  CMatrix sigma_tilde;
  ConstraintsPtr constraints;
  double prior_b = 1.0;

  int k_x() const { return static_cast<int>(mu_tilde.size()); }
  CVector mean() const { return constraints->from_tilde(mu_tilde); }
  CMatrix covariance() const {
    return constraints->x1 * sigma_tilde * constraints->x1.adjoint();
  }
};

GaussianState init_prior(ConstraintsPtr constraints, double b = 1.0);

// Pulsed: Dirichlet (scaled by M for scalar POVM sums). CW: cw_moments when
// the elements sum to M times identity, nonpovm_moments otherwise.
// Throws kEmptyRecord for a CW record without counts.
MeasurementMoments setting_moments(const MeasurementSetting& setting, const OutcomeRecord& rec);

GaussianState kalman_update(const GaussianState& state, const MeasurementSetting& setting,
                            const OutcomeRecord& rec);
GaussianState kalman_update(const GaussianState& state, const MeasurementSetting& setting,
                            const MeasurementMoments& moments);

struct UntildedGaussian {
  CVector mean;
  CMatrix cov;
};

// Same update written with T_X, T_Z and S^dagger in full coordinates.
UntildedGaussian kalman_update_projector_form(const UntildedGaussian& prior,
                                              const ConstraintSubspaces& cs,
                                              const MeasurementSetting& setting,
                                              const MeasurementMoments& moments);
UntildedGaussian kalman_update_projector_form(const UntildedGaussian& prior,
                                              const ConstraintSubspaces& cs,
                                              const MeasurementSetting& setting,
                                              const OutcomeRecord& rec);

// b' with 1/b - 1/b' = 1/sigma2_max.
double variance_cap_b_prime(double b, double sigma2_max);

// Removes a flat prior of width b_prime centred on mu0_tilde (zero when empty).
// Throws kNotCorrectable if Sigma^-1 - 1/b' is not positive definite.
GaussianState correct_prior(const GaussianState& state, double b_prime,
                            const CVector& mu0_tilde = CVector());

// Posterior under an infinitely wide prior. Throws kRankDeficient when the
// settings are not informationally complete.
GaussianState infinite_prior_posterior(ConstraintsPtr constraints,
                                       const std::vector<MeasurementSetting>& settings,
                                       const std::vector<OutcomeRecord>& records);
GaussianState single_shot_posterior(ConstraintsPtr constraints, const MeasurementSetting& setting,
                                    const OutcomeRecord& rec);

// Least-squares inversion rho = sum_j c_j Pi_j / sum_j c_j with G c ~ f,
// G_ij = Tr[Pi_i Pi_j]. Throws kSingularGram if the elements do not span
// the operator space.
CMatrix least_squares_baseline(const std::vector<MeasurementSetting>& settings,
                               const std::vector<OutcomeRecord>& records);

}  // namespace kftomo

#endif  // KFTOMO_KALMAN_H_
