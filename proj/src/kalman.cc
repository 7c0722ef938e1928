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

#include "kftomo/kalman.h"

#include <cmath>
#include <limits>
#include <string>

#include "kftomo/error.h"

namespace kftomo {

namespace {

constexpr double kJitter = 1e-12;

CMatrix inverse_pd(const CMatrix& a, ErrorCode code, const char* what) {
  const CMatrix sym = hermitian_part(a);
  const Eigen::Index k = sym.rows();
  Eigen::LLT<CMatrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.solve(CMatrix::Identity(k, k));
  const double jitter = kJitter * std::abs(sym.trace().real()) / std::max<Eigen::Index>(k, 1);
  llt.compute(sym + jitter * CMatrix::Identity(k, k));
  if (llt.info() != Eigen::Success) throw Error(code, std::string(what) + " is not positive definite");
  return llt.solve(CMatrix::Identity(k, k));
}

MeasurementSubspaces measurement_side(const CMatrix& h, const ConstraintSubspaces& cs,
                                      bool scalar_complete) {
  const int d = static_cast<int>(h.rows());
  MeasurementSubspaces ms;
  if (scalar_complete) {
    ms.z1 = dft_isometry(d);
    ms.t_z = CMatrix::Identity(d, d) - CMatrix::Constant(d, d, 1.0 / d);
  } else {
    ms.z1 = CMatrix::Identity(d, d);
    ms.t_z = CMatrix::Identity(d, d);
  }
  ms.z0 = h * cs.x0;
  return ms;
}

void check_compatible(const GaussianState& state, const MeasurementSetting& setting) {
  if (setting.h_tilde.cols() != state.k_x()) {
    throw Error(ErrorCode::kDimensionMismatch, "setting and state use different constraint spaces");
  }
}

}  // namespace

MeasurementSetting build_setting(const std::vector<CMatrix>& povm, const ConstraintSubspaces& cs) {
  if (povm.empty()) throw Error(ErrorCode::kDimensionMismatch, "a measurement needs at least one element");
  const Eigen::Index dim = povm.front().rows();
  if (dim * dim != cs.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "POVM dimension does not match the state space");
  }
  const int d = static_cast<int>(povm.size());
  CMatrix h(d, dim * dim);
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (int j = 0; j < d; ++j) {
    const CMatrix& e = povm[j];
    if (e.rows() != dim || e.cols() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "POVM element " + std::to_string(j) + " has the wrong shape");
    }
    require_hermitian(e, "POVM element", 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(e), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw Error(ErrorCode::kElementNotPSD, "POVM element " + std::to_string(j) + " is not PSD");
    }
    h.row(j) = vec(e).adjoint();
    sum += e;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(sum), Eigen::EigenvaluesOnly);
  MeasurementSetting s = build_linear_setting(h, cs, es.eigenvalues().minCoeff(),
                                              es.eigenvalues().maxCoeff());
  s.povm = povm;
  return s;
}

MeasurementSetting build_linear_setting(const CMatrix& h, const ConstraintSubspaces& cs,
                                        double m_min, double m_max) {
  if (h.cols() != cs.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "measurement matrix width does not match the state");
  }
  if (h.rows() < 1) throw Error(ErrorCode::kDimensionMismatch, "a setting needs at least one outcome");
  MeasurementSetting s;
  s.h = h;
  s.m_min = m_min;
  s.m_max = m_max;
  s.meas = measurement_side(h, cs, s.scalar_complete());
  s.h_tilde = s.meas.z1.adjoint() * h * cs.x1;
  return s;
}

GaussianState init_prior(ConstraintsPtr constraints, double b) {
  if (!(b > 0.0)) throw Error(ErrorCode::kInvalidArgument, "prior width b must be positive");
  GaussianState s;
  const int k = constraints->k_x();
  s.mu_tilde = CVector::Zero(k);
  s.sigma_tilde = b * CMatrix::Identity(k, k);
  s.constraints = std::move(constraints);
  s.prior_b = b;
  return s;
}

MeasurementMoments setting_moments(const MeasurementSetting& setting, const OutcomeRecord& rec) {
  if (rec.d() != setting.d()) {
    throw Error(ErrorCode::kDimensionMismatch, "record length does not match the setting");
  }
  if (rec.mode == Mode::kPulsed) {
    if (!setting.scalar_complete()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pulsed data needs elements summing to a multiple of the identity");
    }
    MeasurementMoments mm = dirichlet_moments(rec);
    mm.mean *= setting.m_max;
    mm.covariance *= setting.m_max * setting.m_max;
    mm.scale = setting.m_max;
    return mm;
  }
  std::int64_t n = 0;
  for (auto f : rec.counts) n += f;
  if (n == 0) throw Error(ErrorCode::kEmptyRecord, "continuous-wave record has no counts");
  if (setting.scalar_complete()) return cw_moments(rec.counts, setting.m_max);
  return nonpovm_moments(rec.counts, std::max(0.0, setting.m_min), setting.m_max);
}

GaussianState kalman_update(const GaussianState& state, const MeasurementSetting& setting,
                            const OutcomeRecord& rec) {
  return kalman_update(state, setting, setting_moments(setting, rec));
}

GaussianState kalman_update(const GaussianState& state, const MeasurementSetting& setting,
                            const MeasurementMoments& moments) {
  check_compatible(state, setting);
  const CMatrix& z1 = setting.meas.z1;
  const CMatrix& ht = setting.h_tilde;
  const CVector zt = z1.adjoint() * (moments.mean.cast<Complex>() - setting.meas.z0);
  const CMatrix theta_t = hermitian_part(z1.adjoint() * moments.covariance.cast<Complex>() * z1);

  const CMatrix sh = state.sigma_tilde * ht.adjoint();
  const CMatrix innov = ht * sh + theta_t;
  const CMatrix innov_inv = inverse_pd(innov, ErrorCode::kSingularInnovation, "innovation covariance");
  const CMatrix gain = sh * innov_inv;

  GaussianState out = state;
  out.mu_tilde = state.mu_tilde + gain * (zt - ht * state.mu_tilde);

  const CMatrix info = inverse_pd(state.sigma_tilde, ErrorCode::kSingularInnovation, "prior covariance") +
                       ht.adjoint() * inverse_pd(theta_t, ErrorCode::kSingularInnovation,
                                                 "measurement covariance") * ht;
  out.sigma_tilde = hermitian_part(inverse_pd(info, ErrorCode::kSingularInnovation, "information matrix"));
  return out;
}

UntildedGaussian kalman_update_projector_form(const UntildedGaussian& prior,
                                              const ConstraintSubspaces& cs,
                                              const MeasurementSetting& setting,
                                              const MeasurementMoments& moments) {
  const CMatrix& tz = setting.meas.t_z;
  const CMatrix& tx = cs.t_x;
  const CMatrix& h = setting.h;
  const CVector y = tz * (moments.mean.cast<Complex>() - h * prior.mean);
  const CMatrix s = hermitian_part(tz * (h * prior.cov * h.adjoint() + moments.covariance.cast<Complex>()) * tz);
  const CMatrix gain = prior.cov * h.adjoint() * mp_inverse(s);
  UntildedGaussian out;
  out.mean = tx * (prior.mean - cs.x0 + gain * y) + cs.x0;
  out.cov = hermitian_part(tx * (prior.cov - gain * h * prior.cov) * tx);
  return out;
}

UntildedGaussian kalman_update_projector_form(const UntildedGaussian& prior,
                                              const ConstraintSubspaces& cs,
                                              const MeasurementSetting& setting,
                                              const OutcomeRecord& rec) {
  return kalman_update_projector_form(prior, cs, setting, setting_moments(setting, rec));
}

double variance_cap_b_prime(double b, double sigma2_max) {
  const double inv = 1.0 / b - 1.0 / sigma2_max;
  if (!(inv > 0.0)) throw Error(ErrorCode::kNotCorrectable, "variance cap must exceed the prior width");
  return 1.0 / inv;
}

GaussianState correct_prior(const GaussianState& state, double b_prime, const CVector& mu0_tilde) {
  if (!(b_prime > 0.0)) throw Error(ErrorCode::kNotCorrectable, "b' must be positive");
  const int k = state.k_x();
  const CMatrix info = hermitian_part(
      inverse_pd(state.sigma_tilde, ErrorCode::kNotCorrectable, "posterior covariance") -
      CMatrix::Identity(k, k) / b_prime);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(info);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNotCorrectable, "Sigma^-1 - 1/b' is not positive definite");
  }
  const CMatrix& u = es.eigenvectors();
  const CMatrix sigma_c = u * es.eigenvalues().cwiseInverse().asDiagonal() * u.adjoint();
  const CVector mu0 = mu0_tilde.size() == 0 ? CVector::Zero(k) : mu0_tilde;
  GaussianState out = state;
  out.sigma_tilde = hermitian_part(sigma_c);
  out.mu_tilde = state.mu_tilde + sigma_c * (state.mu_tilde - mu0) / b_prime;
  return out;
}

GaussianState infinite_prior_posterior(ConstraintsPtr constraints,
                                       const std::vector<MeasurementSetting>& settings,
                                       const std::vector<OutcomeRecord>& records) {
  if (settings.size() != records.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one record per setting is required");
  }
  const int k = constraints->k_x();
  CMatrix info = CMatrix::Zero(k, k);
  CVector rhs = CVector::Zero(k);
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const MeasurementSetting& st = settings[s];
    if (st.h_tilde.cols() != k) {
      throw Error(ErrorCode::kDimensionMismatch, "setting " + std::to_string(s) + " has the wrong width");
    }
    const MeasurementMoments mm = setting_moments(st, records[s]);
    const CMatrix& z1 = st.meas.z1;
    const CVector zt = z1.adjoint() * (mm.mean.cast<Complex>() - st.meas.z0);
    const CMatrix theta_inv = inverse_pd(z1.adjoint() * mm.covariance.cast<Complex>() * z1,
                                         ErrorCode::kSingularInnovation, "measurement covariance");
    const CMatrix w = st.h_tilde.adjoint() * theta_inv;
    info += w * st.h_tilde;
    rhs += w * zt;
  }
  info = hermitian_part(info);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(info);
  const auto& ev = es.eigenvalues();
  if (k == 0 || ev.minCoeff() <= 1e-12 * std::max(ev.maxCoeff(), 0.0)) {
    throw Error(ErrorCode::kRankDeficient, "settings are not informationally complete");
  }
  const CMatrix& u = es.eigenvectors();
  GaussianState out;
  out.sigma_tilde = hermitian_part(u * ev.cwiseInverse().asDiagonal() * u.adjoint());
  out.mu_tilde = out.sigma_tilde * rhs;
  out.constraints = std::move(constraints);
  out.prior_b = std::numeric_limits<double>::infinity();
  return out;
}

GaussianState single_shot_posterior(ConstraintsPtr constraints, const MeasurementSetting& setting,
                                    const OutcomeRecord& rec) {
  return infinite_prior_posterior(std::move(constraints), {setting}, {rec});
}

CMatrix least_squares_baseline(const std::vector<MeasurementSetting>& settings,
                               const std::vector<OutcomeRecord>& records) {
  if (settings.size() != records.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one record per setting is required");
  }
  std::vector<const CMatrix*> elems;
  std::vector<double> f;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    if (settings[s].povm.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "least squares needs explicit POVM elements");
    }
    for (std::size_t j = 0; j < settings[s].povm.size(); ++j) {
      elems.push_back(&settings[s].povm[j]);
      f.push_back(static_cast<double>(records[s].counts.at(j)));
    }
  }
  if (elems.empty()) throw Error(ErrorCode::kSingularGram, "no elements");
  const Eigen::Index dim = elems.front()->rows();
  const Eigen::Index m = static_cast<Eigen::Index>(elems.size());
  RMatrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = ((*elems[i]) * (*elems[j])).trace().real();
  }
  g = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev(i) > 1e-10 * top ? 1 : 0;
  if (top <= 0.0 || rank < dim * dim) {
    throw Error(ErrorCode::kSingularGram, "elements do not span the operator space");
  }
  const RVector c = mp_inverse(g) * Eigen::Map<const RVector>(f.data(), m);
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < m; ++j) rho += c(j) * (*elems[j]);
  const double norm = c.sum();
  if (std::abs(norm) < 1e-300) throw Error(ErrorCode::kSingularGram, "coefficients sum to zero");
  return hermitian_part(rho / norm);
}

}  // namespace kftomo
