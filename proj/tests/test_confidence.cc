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

#include <cmath>
#include <memory>

#include "doctest.h"
#include "kftomo/confidence.h"
#include "kftomo/error.h"
#include "kftomo/models.h"
#include "kftomo/rng.h"
#include "kftomo/simulate.h"

using namespace kftomo;

namespace {

GaussianState qubit_posterior(std::uint64_t seed, CMatrix* truth = nullptr) {
  auto cs = std::make_shared<const ConstraintSubspaces>(
      standard_state_constraints(2, CMatrix::Identity(2, 2) / 2.0));
  Rng rng(seed);
  const CMatrix rho = models::random_density(2, 2, rng);
  if (truth) *truth = rho;
  GaussianState st = init_prior(cs);
  for (const auto& povm : models::pauli_settings()) {
    st = kalman_update(st, build_setting(povm, *cs), sample_pulsed(born_probabilities(rho, povm), 500, rng));
  }
  return st;
}

}  // namespace

TEST_CASE("Mahalanobis distance agrees with a pseudo-inverse of the full covariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CMatrix truth;
    const GaussianState st = qubit_posterior(seed, &truth);
    const CVector r = vec(truth) - st.mean();
    const double dense = (r.adjoint() * mp_inverse(st.covariance(), 1e-12) * r)(0).real();
    CHECK(mahalanobis_sq(st, truth) == doctest::Approx(dense).epsilon(1e-8));
    CHECK(mahalanobis_sq(st, mat(st.mean())) == doctest::Approx(0.0));
  }
}

TEST_CASE("points off the constraint subspace are rejected") {
  const GaussianState st = qubit_posterior(1);
  CHECK_THROWS_AS(mahalanobis_sq(st, CMatrix::Identity(2, 2)), Error);  // trace 2
}

TEST_CASE("confidence report fields") {
  CMatrix truth;
  const GaussianState st = qubit_posterior(2, &truth);
  const auto r = confidence_report(st, truth, false, 0.5);
  CHECK(r.nu == 3);
  CHECK(r.gamma == doctest::Approx(gamma_nu(3, false)));
  CHECK(r.inside == (r.m2 <= r.gamma));
  CHECK(r.gamma_phys == doctest::Approx(std::pow(std::sqrt(r.gamma) + 0.5, 2)));
  CHECK(physical_gamma(4.0, std::nullopt) == doctest::Approx(16.0));
  CHECK(physical_gamma(4.0, 0.0) == doctest::Approx(4.0));
}

TEST_CASE("error bars") {
  const GaussianState st = qubit_posterior(3);
  const CMatrix id = CMatrix::Identity(2, 2);
  const ErrorBar tr = operator_error_bar(st, id);
  CHECK(tr.mean == doctest::Approx(1.0));
  CHECK(tr.stddev < 1e-8);  // the trace is fixed exactly
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  const ErrorBar ez = operator_error_bar(st, z);
  const CVector a = vec(z);
  CHECK(ez.stddev * ez.stddev ==
        doctest::Approx((a.adjoint() * st.covariance() * a)(0).real()).epsilon(1e-10));
  CMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(operator_error_bar(st, bad), Error);
}

TEST_CASE("covariance spectrum is descending and positive") {
  const RVector s = covariance_spectrum(qubit_posterior(4));
  REQUIRE(s.size() == 3);
  CHECK(s(0) >= s(1));
  CHECK(s(1) >= s(2));
  CHECK(s(2) > 0.0);
}

TEST_CASE("slice ellipse points lie on the requested contour") {
  const GaussianState st = qubit_posterior(5);
  CMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  const double gamma = 7.5;
  const auto pts = slice_ellipse(st, x, z, gamma, 64);
  REQUIRE(pts.size() == 64);
  const CVector a1 = vec(x), a2 = vec(z);
  Eigen::Matrix2d c;
  c << (a1.adjoint() * st.covariance() * a1)(0).real(), (a1.adjoint() * st.covariance() * a2)(0).real(),
      (a2.adjoint() * st.covariance() * a1)(0).real(), (a2.adjoint() * st.covariance() * a2)(0).real();
  const Eigen::Vector2d m((a1.adjoint() * st.mean())(0).real(), (a2.adjoint() * st.mean())(0).real());
  for (const auto& [u, v] : pts) {
    const Eigen::Vector2d d = Eigen::Vector2d(u, v) - m;
    CHECK(d.dot(c.inverse() * d) == doctest::Approx(gamma).epsilon(1e-9));
  }
  CHECK_THROWS_AS(slice_ellipse(st, x, x, gamma), Error);
}
