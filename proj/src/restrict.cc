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

#include "kftomo/restrict.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kftomo/error.h"
#include "kftomo/rng.h"
#include "kftomo/special.h"

namespace kftomo {

TruncatedNormal truncated_normal_approx(double mu, double sigma, double alpha0) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  const double t = -mu / sigma;
  // tau is half the inverse Mills ratio at t.
  const double tau = 0.5 / mills_ratio(t);
  const double g = tau - 0.5 * t;
  const double c = t * tau - 0.5 * (1.0 + t * t);
  const double disc = alpha0 * alpha0 * g * g - 2.0 * c;
  if (disc < 0.0) {
    throw Error(ErrorCode::kNegativeDiscriminant, "no valid truncated-normal approximation");
  }
  TruncatedNormal out;
  out.sigma = sigma * (-alpha0 * g + std::sqrt(disc));
  out.mu = alpha0 * out.sigma;
  return out;
}

namespace {

struct Direction {
  CVector v;       // X1^* a
  double offset;   // Re(a^* x0)
};

Direction make_direction(const ConstraintSubspaces& cs, const CVector& a) {
  if (a.size() != cs.n()) throw Error(ErrorCode::kDimensionMismatch, "direction has the wrong length");
  return Direction{cs.x1.adjoint() * a, (a.adjoint() * cs.x0)(0).real()};
}

Marginal marginal_dir(const GaussianState& st, const Direction& d) {
  Marginal m;
  m.mean = d.offset + (d.v.adjoint() * st.mu_tilde)(0).real();
  m.variance = (d.v.adjoint() * st.sigma_tilde * d.v)(0).real();
  return m;
}

double safe_ratio(const Marginal& m) {
  if (m.variance > 1e-14) return m.ratio();
  if (m.mean >= 0.0) return std::numeric_limits<double>::infinity();
  return -std::numeric_limits<double>::infinity();
}

void step_dir(GaussianState& st, const Direction& d, const Marginal& m, double alpha0) {
  if (m.variance <= 1e-14) {
    throw Error(ErrorCode::kDegenerateMarginal, "marginal variance vanishes");
  }
  const TruncatedNormal tn = truncated_normal_approx(m.mean, std::sqrt(m.variance), alpha0);
  const CVector s = st.sigma_tilde * d.v;
  const double kappa = 1.0 - tn.sigma * tn.sigma / m.variance;
  st.mu_tilde += s * ((tn.mu - m.mean) / m.variance);
  st.sigma_tilde -= (kappa / m.variance) * (s * s.adjoint());
  st.sigma_tilde = hermitian_part(st.sigma_tilde);
}

double min_ratio(const GaussianState& st, const std::vector<Direction>& dirs) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) r = std::min(r, safe_ratio(marginal_dir(st, d)));
  return r;
}

struct OrthantRun {
  int steps = 0;
  int sweeps = 0;
  bool converged = false;
  double min_ratio = 0.0;
};

OrthantRun run_orthant(GaussianState& st, const std::vector<Direction>& dirs, double alpha0,
                       double epsilon, Schedule schedule, int max_sweeps) {
  OrthantRun run;
  const double target = (1.0 - epsilon) * alpha0;
  for (;;) {
    run.min_ratio = min_ratio(st, dirs);
    if (run.min_ratio > target) {
      run.converged = true;
      return run;
    }
    if (run.sweeps >= max_sweeps) return run;
    ++run.sweeps;
    if (schedule == Schedule::kFixedOrder) {
      for (const auto& d : dirs) {
        const Marginal m = marginal_dir(st, d);
        if (safe_ratio(m) < alpha0) {
          step_dir(st, d, m, alpha0);
          ++run.steps;
        }
      }
    } else {
      for (std::size_t n = 0; n < dirs.size(); ++n) {
        std::size_t best = 0;
        double best_ratio = std::numeric_limits<double>::infinity();
        Marginal best_m;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
          const Marginal m = marginal_dir(st, dirs[i]);
          const double r = safe_ratio(m);
          if (r < best_ratio) {
            best_ratio = r;
            best = i;
            best_m = m;
          }
        }
        if (best_ratio > target) break;
        step_dir(st, dirs[best], best_m, alpha0);
        ++run.steps;
      }
    }
  }
}

void attach_maxlik(RestrictionResult& res, const GaussianState& state, const PhysicalSetSpec& spec,
                   const RestrictOptions& opts) {
  if (!opts.with_maxlik) return;
  const MaxLikResult ml = maxlik_state(state, spec);
  res.x_ml = ml.x_ml;
  res.m2_ml = ml.m2_ml;
}

// Rank-one projectors onto the columns of v, vectorized.
std::vector<CVector> projector_directions(const CMatrix& v) {
  std::vector<CVector> out;
  for (Eigen::Index i = 0; i < v.cols(); ++i) out.push_back(vec(v.col(i) * v.col(i).adjoint()));
  return out;
}

CMatrix mean_eigenvectors(const GaussianState& st) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(mat(st.mean())));
  return es.eigenvectors();
}

}  // namespace

Marginal marginal_of(const GaussianState& state, const CVector& a) {
  return marginal_dir(state, make_direction(*state.constraints, a));
}

PseudoMeasurement backprojection_measurement(double mu, double var, const TruncatedNormal& target) {
  PseudoMeasurement p;
  p.kappa = 1.0 - target.sigma * target.sigma / var;
  if (!(p.kappa > 0.0)) {
    throw Error(ErrorCode::kDegenerateMarginal, "target variance does not shrink the marginal");
  }
  p.theta = (1.0 / p.kappa - 1.0) * var;
  p.z = (target.mu - (1.0 - p.kappa) * mu) / p.kappa;
  return p;
}

GaussianState marginal_restriction_step(const GaussianState& state, const CVector& a,
                                        double alpha0) {
  const Direction d = make_direction(*state.constraints, a);
  GaussianState out = state;
  step_dir(out, d, marginal_dir(state, d), alpha0);
  return out;
}

RestrictionResult restrict_orthant(const GaussianState& state, const PhysicalSetSpec& spec,
                                   const RestrictOptions& opts) {
  if (spec.is_psd()) throw Error(ErrorCode::kInvalidArgument, "restrict_orthant needs an orthant set");
  const auto& o = std::get<OrthantSet>(spec.kind);
  std::vector<Direction> dirs;
  dirs.reserve(o.directions.size());
  for (const auto& a : o.directions) dirs.push_back(make_direction(*state.constraints, a));
  RestrictionResult res;
  res.state = state;
  const OrthantRun run = run_orthant(res.state, dirs, spec.alpha0(), spec.epsilon, opts.schedule,
                                     opts.max_sweeps);
  res.iterations = run.steps;
  res.sweeps = run.sweeps;
  res.converged = run.converged;
  res.min_ratio = run.min_ratio;
  attach_maxlik(res, state, spec, opts);
  return res;
}

RestrictionResult restrict_psd(const GaussianState& state, const PhysicalSetSpec& spec,
                               const RestrictOptions& opts) {
  if (!spec.is_psd()) throw Error(ErrorCode::kInvalidArgument, "restrict_psd needs a density-matrix set");
  const int dim = std::get<PsdTraceOneSet>(spec.kind).dim;
  if (dim * dim != state.constraints->n()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not match the density-matrix dimension");
  }
  const double alpha0 = spec.alpha0();
  const double target = (1.0 - spec.epsilon) * alpha0;
  const ConstraintSubspaces& cs = *state.constraints;
  auto eigen_stat = [&](const GaussianState& st) {
    std::vector<Direction> dirs;
    for (const auto& a : projector_directions(mean_eigenvectors(st))) dirs.push_back(make_direction(cs, a));
    return min_ratio(st, dirs);
  };

  RestrictionResult res;
  res.state = state;
  res.min_ratio = eigen_stat(res.state);
  res.converged = res.min_ratio > target;
  Rng rng(opts.seed);
  double best = res.min_ratio;
  int stalls = 0;
  for (int pass = 0; pass < opts.max_passes && !res.converged; ++pass) {
    // The eigenbasis of the mean on pass 0, 5, 10, ...; Haar-random otherwise.
    const CMatrix v = pass % 5 == 0 ? mean_eigenvectors(res.state)
                                    : CMatrix(haar_unitary(dim, rng).adjoint());
    std::vector<Direction> dirs;
    for (const auto& a : projector_directions(v)) dirs.push_back(make_direction(cs, a));
    const OrthantRun run = run_orthant(res.state, dirs, alpha0, spec.epsilon, Schedule::kFixedOrder,
                                       opts.max_sweeps);
    res.iterations += run.steps;
    res.sweeps = pass + 1;
    res.min_ratio = eigen_stat(res.state);
    res.converged = res.min_ratio > target;
    if (res.min_ratio - best <= 1e-4) {
      if (++stalls >= 5) break;
    } else {
      stalls = 0;
    }
    best = std::max(best, res.min_ratio);
  }
  attach_maxlik(res, state, spec, opts);
  return res;
}

RestrictionResult restrict_state(const GaussianState& state, const PhysicalSetSpec& spec,
                                 const RestrictOptions& opts) {
  return spec.is_psd() ? restrict_psd(state, spec, opts) : restrict_orthant(state, spec, opts);
}

}  // namespace kftomo
