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

#include "kftomo/confidence.h"

#include <cmath>
#include <numbers>

#include "kftomo/error.h"

namespace kftomo {

double mahalanobis_sq_vector(const GaussianState& state, const CVector& x) {
  const ConstraintSubspaces& cs = *state.constraints;
  if (x.size() != cs.n()) throw Error(ErrorCode::kDimensionMismatch, "state vector has the wrong length");
  const CVector dx = x - cs.x0;
  const CVector xt = cs.x1.adjoint() * dx;
  if ((dx - cs.x1 * xt).norm() > 1e-8) {
    throw Error(ErrorCode::kOffSubspace, "point violates the exact constraints");
  }
  const CVector r = xt - state.mu_tilde;
  Eigen::LLT<CMatrix> llt(hermitian_part(state.sigma_tilde));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "posterior covariance is not positive definite");
  }
  const CVector y = llt.matrixL().solve(r);
  return y.squaredNorm();
}

double mahalanobis_sq(const GaussianState& state, const CMatrix& rho) {
  return mahalanobis_sq_vector(state, vec(rho));
}

double physical_gamma(double gamma, std::optional<double> m_ml) {
  const double s = std::sqrt(gamma) + (m_ml ? *m_ml : std::sqrt(gamma));
  return s * s;
}

ConfidenceReport confidence_report(const GaussianState& state, const CMatrix& rho,
                                   bool conservative, std::optional<double> m_ml) {
  ConfidenceReport r;
  r.m2 = mahalanobis_sq(state, rho);
  r.nu = state.k_x();
  r.gamma = gamma_nu(r.nu, conservative);
  r.inside = r.m2 <= r.gamma;
  r.gamma_phys = physical_gamma(r.gamma, m_ml);
  return r;
}

ErrorBar functional_error_bar(const GaussianState& state, const CVector& a) {
  const ConstraintSubspaces& cs = *state.constraints;
  const CVector v = cs.x1.adjoint() * a;
  ErrorBar e;
  e.mean = (a.adjoint() * state.mean())(0).real();
  e.stddev = std::sqrt(std::max(0.0, (v.adjoint() * state.sigma_tilde * v)(0).real()));
  return e;
}

ErrorBar operator_error_bar(const GaussianState& state, const CMatrix& op) {
  require_hermitian(op, "observable", 1e-10);
  return functional_error_bar(state, vec(op));
}

RVector covariance_spectrum(const GaussianState& state) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(state.sigma_tilde),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

std::vector<std::pair<double, double>> slice_ellipse_functional(const GaussianState& state,
                                                                const CVector& a1,
                                                                const CVector& a2, double gamma,
                                                                int points) {
  const ConstraintSubspaces& cs = *state.constraints;
  CMatrix v(cs.k_x(), 2);
  v.col(0) = cs.x1.adjoint() * a1;
  v.col(1) = cs.x1.adjoint() * a2;
  const Eigen::Matrix2d c = (v.adjoint() * state.sigma_tilde * v).real();
  const Eigen::Matrix2d cs2 = 0.5 * (c + c.transpose());
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cs2).eigenvalues();
  Eigen::LLT<Eigen::Matrix2d> llt(cs2);
  // Two functionals whose combination is fixed (e.g. complementary projectors) give no slice.
  if (llt.info() != Eigen::Success || !(ev(0) > 1e-10 * ev(1))) {
    throw Error(ErrorCode::kInvalidArgument, "slice directions are degenerate");
  }
  const Eigen::Matrix2d l = llt.matrixL();
  const CVector mean = state.mean();
  const double c1 = (a1.adjoint() * mean)(0).real();
  const double c2 = (a2.adjoint() * mean)(0).real();
  std::vector<std::pair<double, double>> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double th = 2.0 * std::numbers::pi * i / points;
    const Eigen::Vector2d p = std::sqrt(gamma) * l * Eigen::Vector2d(std::cos(th), std::sin(th));
    out.emplace_back(c1 + p(0), c2 + p(1));
  }
  return out;
}

std::vector<std::pair<double, double>> slice_ellipse(const GaussianState& state,
                                                     const CMatrix& op1, const CMatrix& op2,
                                                     double gamma, int points) {
  require_hermitian(op1, "slice operator", 1e-10);
  require_hermitian(op2, "slice operator", 1e-10);
  return slice_ellipse_functional(state, vec(op1), vec(op2), gamma, points);
}

}  // namespace kftomo
