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

#include "kftomo/physical.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "kftomo/error.h"
#include "kftomo/special.h"

namespace kftomo {

double PhysicalSetSpec::alpha0() const { return alpha0_from_alpha(alpha); }

double alpha0_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 0.5)");
  }
  return normal_quantile(1.0 - alpha);
}

OrthantSet coordinate_orthant(int n, std::vector<std::vector<int>> groups) {
  OrthantSet o;
  o.directions.reserve(n);
  for (int i = 0; i < n; ++i) o.directions.push_back(CVector::Unit(n, i));
  o.simplex_groups = std::move(groups);
  return o;
}

CMatrix gell_mann_basis(int dim) {
  const int n = dim * dim;
  CMatrix b = CMatrix::Zero(n, n - 1);
  int col = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      b(j + dim * k, col) = s;
      b(k + dim * j, col) = s;
      ++col;
      b(j + dim * k, col) = Complex(0.0, -s);
      b(k + dim * j, col) = Complex(0.0, s);
      ++col;
    }
  }
  for (int l = 1; l < dim; ++l) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int m = 0; m < l; ++m) b(m * (dim + 1), col) = norm;
    b(l * (dim + 1), col) = -l * norm;
    ++col;
  }
  return b;
}

namespace {

bool is_coordinate_direction(const CVector& a, int* index) {
  Eigen::Index idx = -1;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == Complex(0.0, 0.0)) continue;
    if (idx >= 0 || a(i) != Complex(1.0, 0.0)) return false;
    idx = i;
  }
  if (idx < 0) return false;
  *index = static_cast<int>(idx);
  return true;
}

const OrthantSet& orthant(const PhysicalSetSpec& spec) { return std::get<OrthantSet>(spec.kind); }

void check_coordinate_orthant(const OrthantSet& o, Eigen::Index n) {
  for (const auto& a : o.directions) {
    int idx = 0;
    if (a.size() != n || !is_coordinate_direction(a, &idx)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "projection is only available for coordinate orthants");
    }
  }
}

}  // namespace

RealFrame make_real_frame(const ConstraintSubspaces& cs, const PhysicalSetSpec& spec) {
  RealFrame f;
  f.x0 = cs.x0;
  if (spec.is_psd()) {
    const int dim = std::get<PsdTraceOneSet>(spec.kind).dim;
    if (dim * dim != cs.n() || cs.k_x() != cs.n() - 1) {
      throw Error(ErrorCode::kDimensionMismatch, "state space is not the trace-one density set");
    }
    f.basis = gell_mann_basis(dim);
  } else {
    const RMatrix t = cs.t_x.real();
    if (cs.t_x.imag().cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument, "orthant problems need real constraints");
    }
    f.basis = isometry_from_projector(RMatrix(0.5 * (t + t.transpose()))).cast<Complex>();
  }
  f.w = cs.x1.adjoint() * f.basis;
  return f;
}

RealGaussian real_gaussian(const GaussianState& state, const RealFrame& frame) {
  RealGaussian g;
  g.mean = frame.from_tilde(state.mu_tilde);
  const RMatrix c = (frame.w.adjoint() * state.sigma_tilde * frame.w).real();
  g.cov = 0.5 * (c + c.transpose());
  Eigen::LLT<RMatrix> llt(g.cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "posterior covariance is not positive definite");
  }
  g.precision = llt.solve(RMatrix::Identity(g.cov.rows(), g.cov.cols()));
  g.precision = 0.5 * (g.precision + g.precision.transpose());
  return g;
}

RVector project_simplex(const RVector& v, double total) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += u[i];
    const double t = (cumsum - total) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

CVector project_physical(const PhysicalSetSpec& spec, const CVector& x) {
  if (spec.is_psd()) {
    const CMatrix m = hermitian_part(mat(x));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const RVector lam = project_simplex(es.eigenvalues(), 1.0);
    return vec(es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
  }
  const OrthantSet& o = orthant(spec);
  check_coordinate_orthant(o, x.size());
  RVector r = x.real();
  if (o.simplex_groups.empty()) return r.cwiseMax(0.0).cast<Complex>();
  for (const auto& g : o.simplex_groups) {
    RVector sub(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) sub(i) = r(g[i]);
    sub = project_simplex(sub, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) r(g[i]) = sub(i);
  }
  return r.cast<Complex>();
}

double physicality_violation(const PhysicalSetSpec& spec, const CVector& x) {
  if (spec.is_psd()) {
    const CMatrix m = mat(x);
    double v = (m - m.adjoint()).cwiseAbs().maxCoeff();
    v = std::max(v, std::abs(m.trace() - Complex(1.0, 0.0)));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return std::max(v, -es.eigenvalues().minCoeff());
  }
  const OrthantSet& o = orthant(spec);
  double v = 0.0;
  for (const auto& a : o.directions) v = std::max(v, -(a.adjoint() * x)(0).real());
  for (const auto& g : o.simplex_groups) {
    double s = 0.0;
    for (int i : g) s += x(i).real();
    v = std::max(v, std::abs(s - 1.0));
  }
  return std::max(v, x.imag().cwiseAbs().maxCoeff());
}

CVector physical_center(const PhysicalSetSpec& spec, const ConstraintSubspaces& cs) {
  if (spec.is_psd()) {
    const int dim = std::get<PsdTraceOneSet>(spec.kind).dim;
    return vec(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }
  const OrthantSet& o = orthant(spec);
  if (o.simplex_groups.empty()) {
    for (const auto& a : o.directions) {
      if ((a.adjoint() * cs.x0)(0).real() <= 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "reference point is not strictly inside the orthant");
      }
    }
    return cs.x0;
  }
  CVector c = CVector::Zero(cs.n());
  for (const auto& g : o.simplex_groups) {
    for (int i : g) c(i) = 1.0 / static_cast<double>(g.size());
  }
  return c;
}

namespace {

struct RealProblem {
  RealFrame frame;
  RealGaussian gauss;
  double lipschitz = 0.0;
};

RealProblem real_problem(const GaussianState& state, const PhysicalSetSpec& spec) {
  RealProblem p{make_real_frame(*state.constraints, spec), {}, 0.0};
  p.gauss = real_gaussian(state, p.frame);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(p.gauss.precision, Eigen::EigenvaluesOnly);
  p.lipschitz = 2.0 * es.eigenvalues().maxCoeff();
  return p;
}

RVector project_r(const PhysicalSetSpec& spec, const RealFrame& frame, const RVector& r) {
  return frame.from_full(project_physical(spec, frame.to_full(r)));
}

}  // namespace

MaxLikResult maxlik_state(const GaussianState& state, const PhysicalSetSpec& spec, int max_iter) {
  const RealProblem p = real_problem(state, spec);
  const RVector& mu = p.gauss.mean;
  const RMatrix& prec = p.gauss.precision;
  const double step = 1.0 / p.lipschitz;
  auto m2 = [&](const RVector& r) { return (r - mu).dot(prec * (r - mu)); };

  MaxLikResult out;
  RVector x = project_r(spec, p.frame, mu);
  if ((x - mu).norm() < 1e-14) {
    out.x_ml = p.frame.to_full(x);
    out.m2_ml = 0.0;
    return out;
  }
  RVector y = x;
  double t = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const RVector grad = 2.0 * prec * (y - mu);
    const RVector xn = project_r(spec, p.frame, y - step * grad);
    const double residual = (xn - y).norm();
    // Restart the momentum when it points uphill.
    if ((y - xn).dot(xn - x) > 0.0) {
      t = 1.0;
      y = xn;
    } else {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      t = tn;
    }
    x = xn;
    if (residual < 1e-9) {
      out.x_ml = project_physical(spec, p.frame.to_full(x));
      out.m2_ml = m2(p.frame.from_full(out.x_ml));
      out.iterations = it;
      return out;
    }
  }
  throw Error(ErrorCode::kNoConvergence,
              "maximum-likelihood search did not converge in " + std::to_string(max_iter) + " steps");
}

double maxlik_kkt_residual(const GaussianState& state, const PhysicalSetSpec& spec,
                           const CVector& x) {
  const RealProblem p = real_problem(state, spec);
  const RVector r = p.frame.from_full(x);
  const double step = 1.0 / p.lipschitz;
  const RVector grad = 2.0 * p.gauss.precision * (r - p.gauss.mean);
  return (r - project_r(spec, p.frame, r - step * grad)).norm();
}

}  // namespace kftomo
