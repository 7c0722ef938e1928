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

#ifndef KFTOMO_STATS_H_
#define KFTOMO_STATS_H_

#include <cstdint>
#include <vector>

#include "kftomo/repr.h"

namespace kftomo {

enum class Mode { kPulsed, kCW };

struct OutcomeRecord {
  std::vector<std::int64_t> counts;
  // Pulsed: number of runs, equal to the count total. CW: the count total.
  std::int64_t runs = 0;
  Mode mode = Mode::kPulsed;

  int d() const { return static_cast<int>(counts.size()); }
};

// Validates sum(counts) == runs.
OutcomeRecord pulsed_record(std::vector<std::int64_t> counts, std::int64_t runs);
OutcomeRecord pulsed_record(std::vector<std::int64_t> counts);
OutcomeRecord cw_record(std::vector<std::int64_t> counts);

struct MeasurementMoments {
  RVector mean;
  RMatrix covariance;
  double scale = 1.0;
};

MeasurementMoments dirichlet_moments(const OutcomeRecord& rec);
// (N+d)(N+d+1) G diag(f+1)^{-1} G with G the centering projector.
RMatrix dirichlet_cov_mp_inverse(const OutcomeRecord& rec);
// Dirichlet moments with N = sum(counts), mean scaled by M and covariance by M^2.
MeasurementMoments cw_moments(const std::vector<std::int64_t>& counts, double scale = 1.0);
// Moments when the POVM sum has extremal eigenvalues m <= M.
// Throws kDegenerateRange if M <= 0 or m is outside [0, M].
MeasurementMoments nonpovm_moments(const std::vector<std::int64_t>& counts, double m, double big_m);
// phi_k = d/(d+k) (1 - r^{d+k}) / (1 - r^d), r = m/M.
double nonpovm_phi(int d, int k, double ratio);

double chi2_cdf(double x, int nu);
// Inverse of chi2_cdf by bisection to 1e-10.
double chi2_quantile(double prob, int nu);
// Squared 95% Mahalanobis threshold.
double gamma_nu(int nu, bool conservative);

// Squared Mahalanobis distance bound of the Dirichlet mode, (N+d+1)(d-1)/(N+1).
double mode_cr_bound(std::int64_t n, int d);

struct WaldMoments {
  double mu_z = 0.0;
  double sigma2_z = 0.0;
};

// Wald statistic of a true probability vector against the Dirichlet estimate.
double wald_statistic(const RVector& p, const std::vector<std::int64_t>& counts);
// First two moments of the Wald statistic under Mtn(N, p).
WaldMoments wald_moments(const RVector& p, std::int64_t n);
// Exact sum_{k=1}^n binom(n,k) p^k (1-p)^{n-k} / k.
double inverse_binomial_moment(double p, std::int64_t n);
// Second-order approximation of inverse_binomial_moment(p, n + 1).
double inverse_binomial_moment_approx(double p, std::int64_t n);
// Largest n + 1 for which wald_moments enumerates the inverse moment exactly.
inline constexpr std::int64_t kWaldExactLimit = 5000;

// 1 when p_min >= 20/N, otherwise 1.285 (1 + 2(d - 3/2)/N).
double conservative_sigma_factor(double p_min, std::int64_t n, int d);

}  // namespace kftomo

#endif  // KFTOMO_STATS_H_
