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

#include "kftomo/stats.h"

#include <cmath>
#include <numeric>
#include <string>

#include "kftomo/error.h"
#include "kftomo/special.h"

namespace kftomo {

namespace {

std::int64_t total(const std::vector<std::int64_t>& counts) {
  std::int64_t s = 0;
  for (auto f : counts) {
    if (f < 0) throw Error(ErrorCode::kInvalidArgument, "counts must be non-negative");
    s += f;
  }
  return s;
}

void require_outcomes(int d) {
  if (d < 2) throw Error(ErrorCode::kDimensionMismatch, "at least two outcomes are required");
}

// Dirichlet(f+1) first and second moments, using the count total as N.
MeasurementMoments dirichlet_from_counts(const std::vector<std::int64_t>& counts) {
  const int d = static_cast<int>(counts.size());
  require_outcomes(d);
  const double n = static_cast<double>(total(counts));
  const double nd = n + d;
  MeasurementMoments out;
  out.mean.resize(d);
  out.covariance.resize(d, d);
  const double denom = nd * nd * (nd + 1.0);
  for (int i = 0; i < d; ++i) {
    const double ai = counts[i] + 1.0;
    out.mean(i) = ai / nd;
    for (int j = 0; j < d; ++j) {
      const double aj = counts[j] + 1.0;
      out.covariance(i, j) = i == j ? ai * (nd - ai) / denom : -ai * aj / denom;
    }
  }
  return out;
}

double pow1m(double p, double e) { return std::exp(e * std::log1p(-p)); }

}  // namespace

OutcomeRecord pulsed_record(std::vector<std::int64_t> counts, std::int64_t runs) {
  if (total(counts) != runs) {
    throw Error(ErrorCode::kInvalidArgument, "pulsed counts must sum to the number of runs");
  }
  return OutcomeRecord{std::move(counts), runs, Mode::kPulsed};
}

OutcomeRecord pulsed_record(std::vector<std::int64_t> counts) {
  const std::int64_t n = total(counts);
  return OutcomeRecord{std::move(counts), n, Mode::kPulsed};
}

OutcomeRecord cw_record(std::vector<std::int64_t> counts) {
  const std::int64_t n = total(counts);
  return OutcomeRecord{std::move(counts), n, Mode::kCW};
}

MeasurementMoments dirichlet_moments(const OutcomeRecord& rec) {
  if (rec.mode == Mode::kPulsed && total(rec.counts) != rec.runs) {
    throw Error(ErrorCode::kInvalidArgument, "pulsed counts must sum to the number of runs");
  }
  return dirichlet_from_counts(rec.counts);
}

RMatrix dirichlet_cov_mp_inverse(const OutcomeRecord& rec) {
  const int d = rec.d();
  require_outcomes(d);
  const double nd = static_cast<double>(total(rec.counts)) + d;
  const RMatrix g = RMatrix::Identity(d, d) - RMatrix::Constant(d, d, 1.0 / d);
  RVector inv(d);
  for (int i = 0; i < d; ++i) inv(i) = 1.0 / (rec.counts[i] + 1.0);
  return nd * (nd + 1.0) * g * inv.asDiagonal() * g;
}

MeasurementMoments cw_moments(const std::vector<std::int64_t>& counts, double scale) {
  MeasurementMoments out = dirichlet_from_counts(counts);
  out.mean *= scale;
  out.covariance *= scale * scale;
  out.scale = scale;
  return out;
}

double nonpovm_phi(int d, int k, double ratio) {
  const double base = static_cast<double>(d) / (d + k);
  if (ratio <= 0.0) return base;
  if (ratio >= 1.0) return 1.0;
  const double lr = std::log(ratio);
  return base * std::expm1((d + k) * lr) / std::expm1(d * lr);
}

MeasurementMoments nonpovm_moments(const std::vector<std::int64_t>& counts, double m,
                                   double big_m) {
  if (!(big_m > 0.0)) throw Error(ErrorCode::kDegenerateRange, "M must be positive");
  if (m < 0.0 || m > big_m * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kDegenerateRange, "m must lie in [0, M]");
  }
  const int d = static_cast<int>(counts.size());
  require_outcomes(d);
  const double ratio = std::min(1.0, m / big_m);
  const double phi1 = nonpovm_phi(d, 1, ratio);
  const double phi2 = nonpovm_phi(d, 2, ratio);
  const double nd = static_cast<double>(total(counts)) + d;
  MeasurementMoments out;
  out.scale = big_m;
  out.mean.resize(d);
  out.covariance.resize(d, d);
  for (int i = 0; i < d; ++i) out.mean(i) = big_m * phi1 * (counts[i] + 1.0) / nd;
  const double c2 = big_m * big_m * phi2 / (nd * (nd + 1.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double ai = counts[i] + 1.0;
      const double second = i == j ? c2 * ai * (ai + 1.0) : c2 * ai * (counts[j] + 1.0);
      out.covariance(i, j) = second - out.mean(i) * out.mean(j);
    }
  }
  return out;
}

double chi2_cdf(double x, int nu) {
  if (nu < 1) throw Error(ErrorCode::kInvalidArgument, "chi2 needs nu >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * nu, 0.5 * x);
}

double chi2_quantile(double prob, int nu) {
  if (!(prob >= 0.0 && prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "chi2_quantile needs prob in [0, 1)");
  }
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * nu);
  while (chi2_cdf(hi, nu) < prob) hi *= 2.0;
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, nu) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gamma_nu(int nu, bool conservative) {
  if (nu < 1) throw Error(ErrorCode::kInvalidArgument, "gamma_nu needs nu >= 1");
  const double s = std::sqrt(nu - 0.5) + (conservative ? 1.5 : 1.16309);
  return s * s;
}

double mode_cr_bound(std::int64_t n, int d) {
  const double nn = static_cast<double>(n);
  return (nn + d + 1.0) * (d - 1.0) / (nn + 1.0);
}

double wald_statistic(const RVector& p, const std::vector<std::int64_t>& counts) {
  const int d = static_cast<int>(counts.size());
  if (p.size() != d) throw Error(ErrorCode::kDimensionMismatch, "p and counts differ in length");
  const double nd = static_cast<double>(total(counts)) + d;
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += p(i) * p(i) / (counts[i] + 1.0);
  return (nd + 1.0) * (nd * s - 1.0);
}

double inverse_binomial_moment(double p, std::int64_t n) {
  if (n < 1) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0 / static_cast<double>(n);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double logc = 0.0;
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    logc += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k));
    sum += std::exp(logc + k * lp + (n - k) * lq) / static_cast<double>(k);
  }
  return sum;
}

double inverse_binomial_moment_approx(double p, std::int64_t n) {
  if (p <= 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  const double n1 = nn + 1.0;
  const double mu = n1 * p;
  const double f = expint_ei_scaled(mu) - std::exp(-mu) * (std::log(mu) + kEulerGamma);
  const double mu2 = mu * mu;
  const double mu3 = mu2 * mu;
  const double a = 3.0 * mu2 * mu2 - 8.0 * mu3 - 12.0 * n1 * mu2 + 24.0 * n1 * n1;
  const double b = 12.0 * mu3 - 6.0 * mu2 - 24.0 * n1 * mu - (12.0 * nn + 10.0);
  const double c = -3.0 * mu3 + 5.0 * mu2 + (12.0 * nn + 14.0) * mu + (12.0 * nn + 10.0);
  return (a * f + b * std::exp(-mu) + c) / (24.0 * n1 * n1);
}

WaldMoments wald_moments(const RVector& p, std::int64_t n) {
  const int d = static_cast<int>(p.size());
  require_outcomes(d);
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "wald_moments needs N >= 1");
  const double nn = static_cast<double>(n);
  const double nd = nn + d;
  double s = 1.0;
  for (int i = 0; i < d; ++i) s -= p(i) * pow1m(p(i), nn + 1.0);
  WaldMoments out;
  out.mu_z = (nd + 1.0) * (nd / (nn + 1.0) * s - 1.0);

  double cross = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const double pij = std::max(0.0, 1.0 - p(i) - p(j));
      cross += p(i) * p(j) *
               (1.0 + std::pow(pij, nn + 2.0) - pow1m(p(i), nn + 2.0) - pow1m(p(j), nn + 2.0));
    }
  }
  double gsum = 0.0;
  for (int i = 0; i < d; ++i) {
    const double inv = n + 1 <= kWaldExactLimit ? inverse_binomial_moment(p(i), n + 1)
                                                : inverse_binomial_moment_approx(p(i), n);
    gsum += p(i) * p(i) * p(i) * inv;
  }
  const double pre = (nd + 1.0) * (nd + 1.0) * nd * nd / ((nn + 1.0) * (nn + 1.0));
  out.sigma2_z = pre * ((nn + 1.0) / (nn + 2.0) * cross + (nn + 1.0) * gsum - s * s);
  return out;
}

double conservative_sigma_factor(double p_min, std::int64_t n, int d) {
  const double nn = static_cast<double>(n);
  if (p_min >= 20.0 / nn) return 1.0;
  return 1.285 * (1.0 + 2.0 * (d - 1.5) / nn);
}

}  // namespace kftomo
