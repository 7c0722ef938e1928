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

#include "kftomo/simulate.h"

#include <cmath>
#include <limits>
#include <thread>

#include "kftomo/confidence.h"
#include "kftomo/error.h"

namespace kftomo {

RVector born_probabilities(const CMatrix& rho, const std::vector<CMatrix>& povm) {
  RVector p(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t k = 0; k < povm.size(); ++k) {
    if (povm[k].rows() != rho.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "POVM element and state differ in dimension");
    }
    p(static_cast<Eigen::Index>(k)) = (rho * povm[k]).trace().real();
  }
  return p;
}

RVector born_probabilities(const CVector& x, const MeasurementSetting& setting) {
  return (setting.h * x).real();
}

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  if (nd * p < 10.0) {
    // Inversion by sequential search from zero.
    const double s = p / q;
    const double a = (nd + 1.0) * s;
    double r = std::exp(nd * std::log1p(-p));
    double u = rng.uniform();
    std::int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) return sample_binomial(n, p, rng);
      r *= a / static_cast<double>(x) - s;
    }
    return x;
  }
  // BTRS transformed rejection.
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((nd + 1.0) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<std::int64_t>(k);
    }
  }
}

std::int64_t sample_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  if (mean < 30.0) {
    double p = std::exp(-mean);
    double s = p;
    const double u = rng.uniform();
    std::int64_t x = 0;
    while (u > s) {
      ++x;
      p *= mean / static_cast<double>(x);
      s += p;
      if (p < 1e-300 && x > mean) break;
    }
    return x;
  }
  // PTRS transformed rejection.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

OutcomeRecord sample_pulsed(const RVector& p, std::int64_t n, Rng& rng) {
  if (p.minCoeff() < -1e-12) throw Error(ErrorCode::kInvalidArgument, "negative probability");
  const RVector q = p.cwiseMax(0.0);
  double rest = q.sum();
  if (!(rest > 0.0)) throw Error(ErrorCode::kInvalidArgument, "probabilities sum to zero");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(p.size()), 0);
  std::int64_t left = n;
  for (Eigen::Index i = 0; i < p.size() && left > 0; ++i) {
    if (i + 1 == p.size()) {
      counts[i] = left;
      break;
    }
    const double pi = rest > 0.0 ? std::min(1.0, q(i) / rest) : 0.0;
    counts[i] = sample_binomial(left, pi, rng);
    left -= counts[i];
    rest -= q(i);
  }
  return pulsed_record(std::move(counts), n);
}

OutcomeRecord sample_cw(const RVector& p, double brightness, Rng& rng) {
  if (!(brightness > 0.0)) throw Error(ErrorCode::kInvalidArgument, "brightness must be positive");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    counts[i] = sample_poisson(brightness * std::max(0.0, p(i)), rng);
  }
  return cw_record(std::move(counts));
}

CoverageResult coverage_experiment(ConstraintsPtr constraints, const TrueModel& model, int trials,
                                   std::uint64_t seed, bool conservative, int jobs) {
  CoverageResult out;
  out.gamma = gamma_nu(constraints->k_x(), conservative);
  if (trials <= 0) {
    out.coverage = std::numeric_limits<double>::quiet_NaN();
    out.empty = true;
    return out;
  }
  std::vector<RVector> probs;
  for (const auto& s : model.settings) probs.push_back(born_probabilities(model.x_true, s));
  out.m2.assign(static_cast<std::size_t>(trials), 0.0);

  auto run = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
      std::vector<OutcomeRecord> recs;
      for (const auto& p : probs) {
        recs.push_back(model.mode == Mode::kPulsed ? sample_pulsed(p, model.runs, rng)
                                                   : sample_cw(p, model.brightness, rng));
      }
      const GaussianState post = infinite_prior_posterior(constraints, model.settings, recs);
      out.m2[static_cast<std::size_t>(t)] = mahalanobis_sq_vector(post, model.x_true);
    }
  };
  const int workers = std::max(1, std::min(jobs, trials));
  if (workers == 1) {
    run(0, trials);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(run, trials * w / workers, trials * (w + 1) / workers);
    }
    for (auto& th : pool) th.join();
  }
  int inside = 0;
  for (double v : out.m2) inside += v <= out.gamma ? 1 : 0;
  out.coverage = static_cast<double>(inside) / trials;
  out.empty = false;
  return out;
}

}  // namespace kftomo
