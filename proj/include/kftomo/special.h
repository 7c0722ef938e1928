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

#ifndef KFTOMO_SPECIAL_H_
#define KFTOMO_SPECIAL_H_

namespace kftomo {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
double regularized_gamma_q(double a, double x);

// Exponential integral Ei(x) for x > 0.
double expint_ei(double x);
// exp(-x) Ei(x), finite for any x > 0.
double expint_ei_scaled(double x);

// Inverse of the standard normal CDF.
double normal_quantile(double p);

// Mills ratio R(t) = Q(t) / phi(t), stable for large positive t.
double mills_ratio(double t);

}  // namespace kftomo

#endif  // KFTOMO_SPECIAL_H_
