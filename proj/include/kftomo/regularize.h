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

#ifndef KFTOMO_REGULARIZE_H_
#define KFTOMO_REGULARIZE_H_

#include <optional>
#include <vector>

#include "kftomo/kalman.h"
#include "kftomo/physical.h"

namespace kftomo {

enum class CostKind { kSmoothness, kNegEntropy, kCustomQuadratic };

struct CostFunctional {
  CostKind kind = CostKind::kSmoothness;
  // Smoothness: the state holds `elements` consecutive blocks of `length`
  // entries; for density matrices it acts on the diagonal and length is D.
  int elements = 1;
  int length = 0;
  // Custom quadratic |a x - b|^2 on the full state vector.
  CMatrix a;
  CVector b;

  static CostFunctional smoothness(int elements = 1, int length = 0);
  static CostFunctional neg_entropy();
  static CostFunctional custom_quadratic(CMatrix a, CVector b);
};

// sum_k sum_i (e_k[i+1] - e_k[i])^2.
double smoothness_cost(const std::vector<RVector>& elements);
double evaluate_cost(const CostFunctional& cost, const PhysicalSetSpec& spec, const CVector& x);

struct RegularizedResult {
  CVector x;
  double cost = 0.0;
  double m2 = 0.0;
  double gap = 0.0;  // duality-gap bound of the barrier path at exit
  int newton_steps = 0;
  bool anchored = false;  // the maximum-likelihood point itself was optimal
};

// Minimizes `cost` over the physical states with M^2 <= gamma_phys.
// Throws kEmptyRegion if the maximum-likelihood point lies outside.
RegularizedResult regularized_solution(const GaussianState& state, const PhysicalSetSpec& spec,
                                       const CostFunctional& cost, double gamma_phys,
                                       std::optional<MaxLikResult> ml = std::nullopt);

}  // namespace kftomo

#endif  // KFTOMO_REGULARIZE_H_
