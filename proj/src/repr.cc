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

#include "kftomo/repr.h"

#include <cmath>
#include <numbers>
#include <string>

#include "kftomo/error.h"

namespace kftomo {

CVector vec(const CMatrix& m) {
  const Eigen::Index rows = m.rows();
  CVector v(m.size());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) v(i + rows * j) = m(i, j);
  }
  return v;
}

CMatrix mat(const CVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) {
    throw Error(ErrorCode::kNonSquareLength,
                "vector length " + std::to_string(v.size()) + " is not a perfect square");
  }
  CMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = v(i + n * j);
  }
  return m;
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_hermitian(const CMatrix& m, const char* what, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " is not square");
  }
  if (m.size() > 0 && !is_hermitian(m, tol)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is not Hermitian");
  }
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

namespace {

template <typename Matrix>
Matrix mp_inverse_impl(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const auto& ev = es.eigenvalues();
  const double cutoff = rank_tol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    inv(i) = std::abs(ev(i)) > cutoff && ev(i) != 0.0 ? 1.0 / ev(i) : 0.0;
  }
  const Matrix& u = es.eigenvectors();
  return u * inv.asDiagonal() * u.adjoint();
}

template <typename Matrix>
Matrix isometry_impl(const Matrix& t) {
  if (t.rows() != t.cols()) throw Error(ErrorCode::kNotAProjector, "projector is not square");
  const double herm = (t - t.adjoint()).cwiseAbs().maxCoeff();
  const double idem = (t * t - t).cwiseAbs().maxCoeff();
  if (t.size() > 0 && (herm > 1e-8 || idem > 1e-8)) {
    throw Error(ErrorCode::kNotAProjector, "matrix is not Hermitian idempotent");
  }
  if (t.size() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.adjoint()));
  const auto& ev = es.eigenvalues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev(i) > 0.5 ? 1 : 0;
  // Eigenvalues come out ascending, so the range occupies the last columns.
  return es.eigenvectors().rightCols(rank);
}

}  // namespace

CMatrix mp_inverse(const CMatrix& m, double rank_tol) { return mp_inverse_impl(m, rank_tol); }
RMatrix mp_inverse(const RMatrix& m, double rank_tol) { return mp_inverse_impl(m, rank_tol); }

CMatrix woodbury_inverse(const CMatrix& a_inv, const CMatrix& u, const CMatrix& c,
                         const CMatrix& v) {
  if (u.rows() != a_inv.rows() || v.rows() != a_inv.rows() || c.rows() != u.cols() ||
      c.cols() != v.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "woodbury_inverse operand shapes disagree");
  }
  if (u.cols() == 0 || u.cwiseAbs().maxCoeff() == 0.0 || v.cwiseAbs().maxCoeff() == 0.0) {
    return a_inv;
  }
  Eigen::FullPivLU<CMatrix> c_lu(c);
  if (!c_lu.isInvertible()) throw Error(ErrorCode::kSingularCorrection, "C is singular");
  const CMatrix ainv_u = a_inv * u;
  const CMatrix inner = c_lu.inverse() + v.adjoint() * ainv_u;
  Eigen::FullPivLU<CMatrix> lu(inner);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularCorrection, "C^-1 + V* A^-1 U is singular");
  }
  return a_inv - ainv_u * lu.solve(v.adjoint() * a_inv);
}

CMatrix isometry_from_projector(const CMatrix& t) { return isometry_impl(t); }
RMatrix isometry_from_projector(const RMatrix& t) { return isometry_impl(t); }

CMatrix dft_isometry(int d) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dft_isometry needs d >= 1");
  CMatrix z(d, d - 1);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 1; k < d; ++k) {
      // Reduce the phase index first so large d keeps full precision.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / d;
      z(j, k - 1) = std::polar(norm, phase);
    }
  }
  return z;
}

ConstraintSubspaces standard_state_constraints(int dim, const CMatrix& rho0) {
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "reference state has the wrong dimension");
  }
  if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > 1e-10) {
    throw Error(ErrorCode::kBadReference, "reference state must have unit trace");
  }
  const int n = dim * dim;
  ConstraintSubspaces cs;
  cs.x0 = vec(rho0);
  const CVector one = vec(CMatrix::Identity(dim, dim));
  cs.t_x = CMatrix::Identity(n, n) - one * one.adjoint() / static_cast<double>(dim);

  // Diagonal block: DFT over the D diagonal positions minus the constant
  // column. Off-diagonal positions: plain unit vectors.
  cs.x1 = CMatrix::Zero(n, n - 1);
  const CMatrix f = dft_isometry(dim);
  int col = 0;
  for (int k = 0; k < dim - 1; ++k, ++col) {
    for (int j = 0; j < dim; ++j) cs.x1(j * (dim + 1), col) = f(j, k);
  }
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      if (i != j) cs.x1(i + dim * j, col++) = 1.0;
    }
  }
  return cs;
}

ConstraintSubspaces linear_constraints(const RMatrix& c, const RVector& x0) {
  if (c.cols() != x0.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "constraint matrix and reference disagree");
  }
  const Eigen::Index n = x0.size();
  const RMatrix t = RMatrix::Identity(n, n) - mp_inverse(RMatrix(c.transpose() * c)) * c.transpose() * c;
  ConstraintSubspaces cs;
  const RMatrix tsym = 0.5 * (t + t.transpose());
  cs.t_x = tsym.cast<Complex>();
  cs.x1 = isometry_from_projector(tsym).cast<Complex>();
  cs.t_x = cs.x1 * cs.x1.adjoint();
  cs.x0 = x0.cast<Complex>();
  return cs;
}

}  // namespace kftomo
