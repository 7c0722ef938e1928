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

#ifndef KFTOMO_PHYSICAL_H_
#define KFTOMO_PHYSICAL_H_

#include <variant>
#include <vector>

#include "kftomo/kalman.h"
#include "kftomo/repr.h"

namespace kftomo {

// Non-negativity of the functionals a_i^* x. When `simplex_groups` is
// non-empty the coordinates of each group also sum to one, and every
// direction must be a coordinate unit vector.
struct OrthantSet {
  std::vector<CVector> directions;
  std::vector<std::vector<int>> simplex_groups;
};

// Density matrices: PSD with unit trace.
struct PsdTraceOneSet {
  int dim = 2;
};

struct PhysicalSetSpec {
  std::variant<OrthantSet, PsdTraceOneSet> kind;
  double epsilon = 0.003;
  double alpha = 0.05;

  double alpha0() const;
  bool is_psd() const { return std::holds_alternative<PsdTraceOneSet>(kind); }
};

// One-sided normal threshold with tail mass alpha: 1.64485 for alpha = 0.05.
double alpha0_from_alpha(double alpha);

// Orthant over all n coordinates, optionally with simplex groups.
OrthantSet coordinate_orthant(int n, std::vector<std::vector<int>> groups = {});

// Real orthonormal coordinates r for the affine constraint space:
// x = x0 + basis * r. For density matrices the basis is the generalized
// Gell-Mann family, so r is real for every Hermitian x.
struct RealFrame {
  CMatrix basis;  // n x k
  CMatrix w;      // x1^* basis, k x k unitary
  CVector x0;

  int k() const { return static_cast<int>(basis.cols()); }
  CVector to_full(const RVector& r) const { return x0 + basis * r.cast<Complex>(); }
  RVector from_full(const CVector& x) const { return (basis.adjoint() * (x - x0)).real(); }
  RVector from_tilde(const CVector& xt) const { return (w.adjoint() * xt).real(); }
};

// Orthonormal traceless Hermitian basis, vectorized, D^2 x (D^2 - 1).
CMatrix gell_mann_basis(int dim);
RealFrame make_real_frame(const ConstraintSubspaces& cs, const PhysicalSetSpec& spec);

struct RealGaussian {
  RVector mean;
  RMatrix cov;
  RMatrix precision;
};
RealGaussian real_gaussian(const GaussianState& state, const RealFrame& frame);

// Euclidean projection of a simplex-like vector onto {v >= 0, sum v = total}.
RVector project_simplex(const RVector& v, double total = 1.0);
// Euclidean projection of a full-space vector onto the physical set.
CVector project_physical(const PhysicalSetSpec& spec, const CVector& x);
// Largest violation of positivity or of the affine constraints.
double physicality_violation(const PhysicalSetSpec& spec, const CVector& x);
// Strictly interior reference point: maximally mixed state or uniform groups.
CVector physical_center(const PhysicalSetSpec& spec, const ConstraintSubspaces& cs);

struct MaxLikResult {
  CVector x_ml;
  double m2_ml = 0.0;
  int iterations = 0;
};

// Minimizes the squared Mahalanobis distance over the physical set with an
// accelerated projected gradient in the real frame. Throws kNoConvergence.
MaxLikResult maxlik_state(const GaussianState& state, const PhysicalSetSpec& spec,
                          int max_iter = 1000000);

// Length of one projected-gradient step from x with step 1/L. Zero exactly
// when the negative gradient lies in the normal cone at x.
double maxlik_kkt_residual(const GaussianState& state, const PhysicalSetSpec& spec,
                           const CVector& x);

}  // namespace kftomo

#endif  // KFTOMO_PHYSICAL_H_
