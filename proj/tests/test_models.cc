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

#include "doctest.h"
#include "kftomo/error.h"
#include "kftomo/models.h"

using namespace kftomo;

TEST_CASE("Pauli settings are complete projective measurements") {
  for (const auto& povm : models::pauli_settings()) {
    REQUIRE(povm.size() == 2);
    CHECK((povm[0] + povm[1] - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((povm[0] * povm[0] - povm[0]).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("two-qubit projector table") {
  const auto p = models::two_qubit_projectors();
  const auto labels = models::two_qubit_labels();
  REQUIRE(p.size() == 36);
  CHECK(labels.front() == "HH");
  CHECK(labels[1] == "HV");
  CHECK(labels.back() == "LL");
  CMatrix sum = CMatrix::Zero(4, 4);
  for (const auto& e : p) sum += e;
  CHECK((sum - 9.0 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
  const CMatrix bell = models::bell_state();
  CHECK(std::abs(bell.trace() - Complex(1.0)) < 1e-15);
  // <HH|Phi+|HH> = 1/2, <HV|Phi+|HV> = 0.
  CHECK(std::real((p[0] * bell).trace()) == doctest::Approx(0.5));
  CHECK(std::abs((p[1] * bell).trace()) < 1e-15);
}

TEST_CASE("random density matrices") {
  Rng rng(3);
  for (int rank : {1, 2, 4}) {
    const CMatrix rho = models::random_density(4, rank, rng);
    CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-13);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
    int nonzero = 0;
    for (int i = 0; i < 4; ++i) nonzero += es.eigenvalues()(i) > 1e-10 ? 1 : 0;
    CHECK(nonzero == rank);
  }
}

TEST_CASE("coherent weights are Poisson") {
  const RVector w = models::coherent_weights(1.0, 40);
  CHECK(w.sum() == doctest::Approx(1.0));
  CHECK(w(0) == doctest::Approx(std::exp(-1.0)));
  CHECK(w(3) == doctest::Approx(std::exp(-1.0) / 6.0));
}

TEST_CASE("detector bank truth") {
  const models::DiagonalFamily fam{3, 6};
  const RVector t = models::detector_bank_truth(2, 1.0, fam.depth);
  REQUIRE(t.size() == fam.size());
  for (const auto& g : fam.groups()) {
    double s = 0.0;
    for (int i : g) s += t(i);
    CHECK(s == doctest::Approx(1.0));
  }
  // Perfect efficiency, two photons on two detectors: one or two clicks, equally likely.
  CHECK(t(1 * fam.depth + 2) == doctest::Approx(0.5));
  CHECK(t(2 * fam.depth + 2) == doctest::Approx(0.5));
  // Lossy single photon.
  const RVector lossy = models::detector_bank_truth(2, 0.6, fam.depth);
  CHECK(lossy(0 * fam.depth + 1) == doctest::Approx(0.4));
  CHECK(lossy(1 * fam.depth + 1) == doctest::Approx(0.6));
}

TEST_CASE("diagonal constraints and settings") {
  const models::DiagonalFamily fam{3, 4};
  const ConstraintSubspaces cs = models::diagonal_constraints(fam);
  CHECK(cs.n() == 12);
  CHECK(cs.k_x() == 12 - 4);
  const auto setting = models::diagonal_setting(fam, models::coherent_weights(0.8, fam.depth), cs);
  CHECK(setting.d() == 3);
  CHECK(setting.scalar_complete());
  CHECK_THROWS_AS(models::diagonal_setting(fam, RVector::Ones(3), cs), Error);
}
