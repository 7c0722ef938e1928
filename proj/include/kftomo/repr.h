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

#ifndef KFTOMO_REPR_H_
#define KFTOMO_REPR_H_

#include <complex>

#include <Eigen/Dense>

namespace kftomo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Column-major stacking: entry i + D*j of vec(m) is m(i, j).
CVector vec(const CMatrix& m);
// Inverse of vec. Throws kNonSquareLength if the length is not a square.
CMatrix mat(const CVector& v);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);
// Throws kInvalidArgument naming `what` if m is not Hermitian within tol.
void require_hermitian(const CMatrix& m, const char* what, double tol = 1e-12);
CMatrix hermitian_part(const CMatrix& m);

// Moore-Penrose inverse of a Hermitian PSD matrix. Eigenvalues below
// rank_tol * lambda_max are treated as zero.
CMatrix mp_inverse(const CMatrix& m, double rank_tol = 1e-10);
RMatrix mp_inverse(const RMatrix& m, double rank_tol = 1e-10);

// (A + U C V^*)^{-1} given A^{-1}. Throws kSingularCorrection when
// C^{-1} + V^* A^{-1} U is numerically singular.
CMatrix woodbury_inverse(const CMatrix& a_inv, const CMatrix& u, const CMatrix& c,
                         const CMatrix& v);

// Orthonormal basis of range(t) for a Hermitian idempotent t.
// Throws kNotAProjector if t fails the check at 1e-8.
CMatrix isometry_from_projector(const CMatrix& t);
RMatrix isometry_from_projector(const RMatrix& t);

// d x (d-1) DFT kernel with the constant column dropped.
CMatrix dft_isometry(int d);

// Exact affine constraints on the state vector: x lies in x0 + range(t_x).
struct ConstraintSubspaces {
  CMatrix t_x;
  CMatrix x1;
  CVector x0;

  int n() const { return static_cast<int>(x0.size()); }
  int k_x() const { return static_cast<int>(x1.cols()); }
  CVector to_tilde(const CVector& x) const { return x1.adjoint() * (x - x0); }
  CVector from_tilde(const CVector& xt) const { return x0 + x1 * xt; }
};

// Measurement-side constraints, bound per setting: z lies in z0 + range(t_z).
struct MeasurementSubspaces {
  CMatrix t_z;
  CMatrix z1;
  CVector z0;

  int k_z() const { return static_cast<int>(z1.cols()); }
};

// Trace-one density matrices of dimension D around the reference rho0.
// Throws kBadReference if trace(rho0) differs from 1 by more than 1e-10.
ConstraintSubspaces standard_state_constraints(int dim, const CMatrix& rho0);

// Affine constraints C x = C x0 with t_x = 1 - C^+ C. Real C gives a real x1.
ConstraintSubspaces linear_constraints(const RMatrix& c, const RVector& x0);

}  // namespace kftomo

#endif  // KFTOMO_REPR_H_
