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

#include "kftomo/regularize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kftomo/error.h"
#include "kftomo/kernels.h"

namespace kftomo {

CostFunctional CostFunctional::smoothness(int elements, int length) {
  CostFunctional c;
  c.kind = CostKind::kSmoothness;
  c.elements = elements;
  c.length = length;
  return c;
}

CostFunctional CostFunctional::neg_entropy() {
  CostFunctional c;
  c.kind = CostKind::kNegEntropy;
  return c;
}

CostFunctional CostFunctional::custom_quadratic(CMatrix a, CVector b) {
  CostFunctional c;
  c.kind = CostKind::kCustomQuadratic;
  c.a = std::move(a);
  c.b = std::move(b);
  return c;
}

double smoothness_cost(const std::vector<RVector>& elements) {
  double s = 0.0;
  for (const auto& e : elements) {
    s += kernels::sum_sq_adjacent_diff(e.data(), static_cast<std::size_t>(e.size()));
  }
  return s;
}

namespace {

constexpr double kEntropyFloor = 1e-12;

// Difference operator whose squared norm is the smoothness cost.
CMatrix smoothness_operator(const CostFunctional& c, const PhysicalSetSpec& spec, Eigen::Index n) {
  std::vector<Eigen::Index> pos;
  int elements = c.elements;
  int length = c.length;
  if (spec.is_psd()) {
    const int dim = std::get<PsdTraceOneSet>(spec.kind).dim;
    elements = 1;
    length = dim;
    for (int i = 0; i < dim; ++i) pos.push_back(i * (dim + 1));
  } else {
    if (length <= 0) length = static_cast<int>(n) / std::max(elements, 1);
    if (static_cast<Eigen::Index>(elements) * length != n) {
      throw Error(ErrorCode::kDimensionMismatch, "smoothness layout does not cover the state");
    }
    for (Eigen::Index i = 0; i < n; ++i) pos.push_back(i);
  }
  CMatrix d = CMatrix::Zero(elements * (length - 1), n);
  int row = 0;
  for (int k = 0; k < elements; ++k) {
    for (int i = 0; i + 1 < length; ++i, ++row) {
      d(row, pos[k * length + i + 1]) = 1.0;
      d(row, pos[k * length + i]) = -1.0;
    }
  }
  return d;
}

std::vector<RVector> smoothness_blocks(const CostFunctional& c, const PhysicalSetSpec& spec,
                                       const CVector& x) {
  std::vector<RVector> out;
  if (spec.is_psd()) {
    out.push_back(mat(x).diagonal().real());
    return out;
  }
  const int length = c.length > 0 ? c.length : static_cast<int>(x.size()) / std::max(c.elements, 1);
  if (static_cast<Eigen::Index>(c.elements) * length != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "smoothness layout does not cover the state");
  }
  for (int k = 0; k < c.elements; ++k) out.push_back(x.segment(k * length, length).real());
  return out;
}

double entropy_term(double v) { return v > kEntropyFloor ? v * std::log(v) : v * std::log(kEntropyFloor); }

// Value, gradient and Hessian of a term in the real frame.
struct Local {
  double value = 0.0;
  RVector grad;
  RMatrix hess;
};

class Problem {
 public:
  Problem(const GaussianState& state, const PhysicalSetSpec& spec, const CostFunctional& cost,
          double gamma)
      : spec_(spec), cost_(cost), gamma_(gamma), frame_(make_real_frame(*state.constraints, spec)) {
    gauss_ = real_gaussian(state, frame_);
    const int k = frame_.k();
    if (cost.kind != CostKind::kNegEntropy) {
      CMatrix a;
      CVector b;
      if (cost.kind == CostKind::kSmoothness) {
        a = smoothness_operator(cost, spec, frame_.x0.size());
        b = CVector::Zero(a.rows());
      } else {
        if (cost.a.cols() != frame_.x0.size() || cost.a.rows() != cost.b.size()) {
          throw Error(ErrorCode::kDimensionMismatch, "custom quadratic has the wrong shape");
        }
        a = cost.a;
        b = cost.b;
      }
      g_ = a * frame_.basis;
      c_ = b - a * frame_.x0;
      quad_hess_ = 2.0 * (g_.adjoint() * g_).real();
    }
    if (!spec.is_psd()) {
      const auto& o = std::get<OrthantSet>(spec.kind);
      dir_rows_.resize(static_cast<Eigen::Index>(o.directions.size()), k);
      dir_off_.resize(static_cast<Eigen::Index>(o.directions.size()));
      for (std::size_t i = 0; i < o.directions.size(); ++i) {
        const CVector& a = o.directions[i];
        dir_rows_.row(static_cast<Eigen::Index>(i)) = (a.adjoint() * frame_.basis).real();
        dir_off_(static_cast<Eigen::Index>(i)) = (a.adjoint() * frame_.x0)(0).real();
      }
      barrier_count_ = static_cast<int>(o.directions.size()) + 1;
    } else {
      dim_ = std::get<PsdTraceOneSet>(spec.kind).dim;
      barrier_count_ = dim_ + 1;
      for (int j = 0; j < k; ++j) basis_mats_.push_back(mat(frame_.basis.col(j)));
    }
  }

  const RealFrame& frame() const { return frame_; }
  int barrier_count() const { return barrier_count_; }

  double m2(const RVector& r) const {
    const RVector y = r - gauss_.mean;
    return y.dot(gauss_.precision * y);
  }

  Local cost_terms(const RVector& r, bool need_hess) const {
    Local l;
    const int k = frame_.k();
    if (cost_.kind != CostKind::kNegEntropy) {
      const CVector res = g_ * r.cast<Complex>() - c_;
      l.value = res.squaredNorm();
      l.grad = 2.0 * (g_.adjoint() * res).real();
      if (need_hess) l.hess = quad_hess_;
      return l;
    }
    const CVector x = frame_.to_full(r);
    if (spec_.is_psd()) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(mat(x)));
      const RVector lam = es.eigenvalues().cwiseMax(kEntropyFloor);
      const CMatrix& v = es.eigenvectors();
      for (Eigen::Index i = 0; i < lam.size(); ++i) l.value += entropy_term(es.eigenvalues()(i));
      const CMatrix logx = v * lam.array().log().matrix().cast<Complex>().asDiagonal() * v.adjoint();
      l.grad = (frame_.basis.adjoint() * vec(logx)).real();
      if (need_hess) {
        const Eigen::Index d = lam.size();
        RMatrix gamma(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
          for (Eigen::Index b = 0; b < d; ++b) {
            const double la = lam(a), lb = lam(b);
            gamma(a, b) = std::abs(la - lb) > 1e-12 * std::max(la, lb)
                              ? (std::log(la) - std::log(lb)) / (la - lb)
                              : 1.0 / la;
          }
        }
        std::vector<CMatrix> e;
        for (int j = 0; j < k; ++j) e.push_back(v.adjoint() * basis_mats_[j] * v);
        l.hess.resize(k, k);
        for (int j = 0; j < k; ++j) {
          for (int m = j; m < k; ++m) {
            const double h = (gamma.cast<Complex>().array() * e[j].conjugate().array() * e[m].array())
                                 .sum().real();
            l.hess(j, m) = h;
            l.hess(m, j) = h;
          }
        }
      }
      return l;
    }
    const RVector xr = x.real();
    const RMatrix b = frame_.basis.real();
    RVector dlog(xr.size());
    RVector inv(xr.size());
    for (Eigen::Index i = 0; i < xr.size(); ++i) {
      const double v = std::max(xr(i), kEntropyFloor);
      l.value += entropy_term(xr(i));
      dlog(i) = std::log(v) + 1.0;
      inv(i) = 1.0 / v;
    }
    l.grad = b.transpose() * dlog;
    if (need_hess) l.hess = b.transpose() * inv.asDiagonal() * b;
    return l;
  }

  // Barrier for physicality and the ellipsoid; nullopt outside the domain.
  std::optional<Local> barrier_terms(const RVector& r, bool need_hess) const {
    Local l;
    const int k = frame_.k();
    const RVector y = r - gauss_.mean;
    const RVector py = gauss_.precision * y;
    const double u = gamma_ - y.dot(py);
    if (!(u > 0.0)) return std::nullopt;
    l.value = -std::log(u);
    l.grad = 2.0 * py / u;
    if (need_hess) l.hess = 2.0 * gauss_.precision / u + 4.0 * (py * py.transpose()) / (u * u);

    if (spec_.is_psd()) {
      const CMatrix x = hermitian_part(mat(frame_.to_full(r)));
      Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
      const RVector lam = es.eigenvalues();
      if (!(lam.minCoeff() > 0.0)) return std::nullopt;
      const CMatrix& v = es.eigenvectors();
      l.value -= lam.array().log().sum();
      const CMatrix xinv = v * lam.cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();
      l.grad -= (frame_.basis.adjoint() * vec(xinv)).real();
      if (need_hess) {
        const CMatrix xm12 = v * lam.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();
        CMatrix ys(dim_ * dim_, k);
        for (int j = 0; j < k; ++j) ys.col(j) = vec(xm12 * basis_mats_[j] * xm12);
        l.hess += (ys.adjoint() * ys).real();
      }
    } else {
      const RVector s = dir_off_ + dir_rows_ * r;
      if (!(s.minCoeff() > 0.0)) return std::nullopt;
      l.value -= s.array().log().sum();
      const RVector inv = s.cwiseInverse();
      l.grad -= dir_rows_.transpose() * inv;
      if (need_hess) l.hess += dir_rows_.transpose() * inv.cwiseAbs2().asDiagonal() * dir_rows_;
    }
    return l;
  }

 private:
  const PhysicalSetSpec& spec_;
  const CostFunctional& cost_;
  double gamma_;
  RealFrame frame_;
  RealGaussian gauss_;
  CMatrix g_;
  CVector c_;
  RMatrix quad_hess_;
  RMatrix dir_rows_;
  RVector dir_off_;
  std::vector<CMatrix> basis_mats_;
  int dim_ = 0;
  int barrier_count_ = 0;
};

}  // namespace

double evaluate_cost(const CostFunctional& cost, const PhysicalSetSpec& spec, const CVector& x) {
  switch (cost.kind) {
    case CostKind::kSmoothness:
      return smoothness_cost(smoothness_blocks(cost, spec, x));
    case CostKind::kCustomQuadratic:
      return (cost.a * x - cost.b).squaredNorm();
    case CostKind::kNegEntropy: {
      double s = 0.0;
      if (spec.is_psd()) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(mat(x)), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += entropy_term(es.eigenvalues()(i));
      } else {
        for (Eigen::Index i = 0; i < x.size(); ++i) s += entropy_term(x(i).real());
      }
      return s;
    }
  }
  return 0.0;
}

RegularizedResult regularized_solution(const GaussianState& state, const PhysicalSetSpec& spec,
                                       const CostFunctional& cost, double gamma_phys,
                                       std::optional<MaxLikResult> ml) {
  if (!ml) ml = maxlik_state(state, spec);
  if (ml->m2_ml > gamma_phys * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kEmptyRegion, "maximum-likelihood point lies outside the region");
  }
  const Problem prob(state, spec, cost, gamma_phys);
  const RealFrame& frame = prob.frame();
  RegularizedResult anchor;
  anchor.x = ml->x_ml;
  anchor.cost = evaluate_cost(cost, spec, ml->x_ml);
  anchor.m2 = ml->m2_ml;
  anchor.anchored = true;
  if (gamma_phys - ml->m2_ml <= 1e-12 * std::max(1.0, gamma_phys)) return anchor;

  // Strictly feasible start on the segment from the ML point to the centre.
  const RVector r_ml = frame.from_full(ml->x_ml);
  const RVector r_c = frame.from_full(physical_center(spec, *state.constraints));
  const double slack = gamma_phys - ml->m2_ml;
  double lambda = 0.5;
  RVector r = r_ml;
  for (int i = 0; i < 80; ++i, lambda *= 0.5) {
    r = (1.0 - lambda) * r_ml + lambda * r_c;
    if (prob.m2(r) < gamma_phys - 0.25 * slack && prob.barrier_terms(r, false)) break;
  }
  if (!prob.barrier_terms(r, false)) return anchor;

  auto objective = [&](const RVector& x, double t, bool hess) -> std::optional<Local> {
    auto b = prob.barrier_terms(x, hess);
    if (!b) return std::nullopt;
    const Local c = prob.cost_terms(x, hess);
    Local l;
    l.value = t * c.value + b->value;
    l.grad = t * c.grad + b->grad;
    if (hess) l.hess = t * c.hess + b->hess;
    return l;
  };

  const int m = prob.barrier_count();
  const double c0 = std::abs(prob.cost_terms(r, false).value);
  double t = m / std::max(1e-12, c0);
  const double target_gap = 1e-10 * std::max(1.0, c0);
  int newton = 0;
  bool healthy = true;
  for (int outer = 0; outer < 80 && healthy; ++outer) {
    for (int it = 0; it < 200; ++it) {
      const auto cur = objective(r, t, true);
      if (!cur) {
        healthy = false;
        break;
      }
      const RMatrix hs = 0.5 * (cur->hess + cur->hess.transpose());
      Eigen::LDLT<RMatrix> ldlt(hs);
      RVector dir = -ldlt.solve(cur->grad);
      if (!dir.allFinite()) {
        healthy = false;
        break;
      }
      const double dec = -cur->grad.dot(dir);
      if (dec < 0.0) dir = -cur->grad;
      if (std::abs(dec) * 0.5 < 1e-12) break;
      double s = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
        const RVector trial = r + s * dir;
        const auto nv = objective(trial, t, false);
        if (nv && nv->value <= cur->value + 0.25 * s * cur->grad.dot(dir)) {
          r = trial;
          moved = true;
          break;
        }
      }
      ++newton;
      if (!moved) break;
    }
    if (m / t < target_gap) break;
    t *= 10.0;
  }

  RegularizedResult res;
  res.x = frame.to_full(r);
  res.cost = evaluate_cost(cost, spec, res.x);
  res.m2 = prob.m2(r);
  res.gap = m / t;
  res.newton_steps = newton;
  if (anchor.cost <= res.cost) {
    anchor.newton_steps = newton;
    anchor.gap = res.gap;
    return anchor;
  }
  return res;
}

}  // namespace kftomo
