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
#include <limits>
#include <memory>

#include "doctest.h"
#include "kftomo/error.h"
#include "kftomo/kalman.h"
#include "kftomo/models.h"
#include "kftomo/rng.h"
#include "kftomo/simulate.h"

using namespace kftomo;

namespace {

struct Qubit {
  ConstraintsPtr cs;
  std::vector<MeasurementSetting> settings;
  std::vector<OutcomeRecord> records;
  CMatrix truth;
};

Qubit pauli_qubit(std::uint64_t seed, std::int64_t runs = 300) {
  Qubit q;
  q.cs = std::make_shared<const ConstraintSubspaces>(
      standard_state_constraints(2, CMatrix::Identity(2, 2) / 2.0));
  Rng rng(seed);
  q.truth = models::random_density(2, 2, rng);
  for (const auto& povm : models::pauli_settings()) {
    q.settings.push_back(build_setting(povm, *q.cs));
    q.records.push_back(sample_pulsed(born_probabilities(q.truth, povm), runs, rng));
  }
  return q;
}

GaussianState chain(const Qubit& q, double b, const std::vector<int>& order) {
  GaussianState st = init_prior(q.cs, b);
  for (int i : order) st = kalman_update(st, q.settings[i], q.records[i]);
  return st;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("setting construction") {
  const auto q = pauli_qubit(1);
  for (const auto& s : q.settings) {
    CHECK(s.d() == 2);
    CHECK(s.scalar_complete());
    CHECK(s.h.cols() == 4);
    CHECK(s.h_tilde.cols() == q.cs->k_x());
  }
  // Elements that do not sum to the identity.
  std::vector<CMatrix> partial{q.settings[0].povm[0]};
  const auto one = build_setting(partial, *q.cs);
  CHECK_FALSE(one.scalar_complete());
  CHECK_THROWS_AS(build_setting({CMatrix::Identity(3, 3)}, *q.cs), Error);
}

TEST_CASE("posterior mean keeps unit trace and Hermiticity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto q = pauli_qubit(seed);
    const GaussianState st = chain(q, 1.0, {0, 1, 2});
    const CMatrix rho = mat(st.mean());
    CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
    CHECK(is_hermitian(rho, 1e-12));
    CHECK(is_hermitian(st.sigma_tilde, 1e-12));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(st.sigma_tilde);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("update order does not matter") {
  const auto q = pauli_qubit(4);
  const auto a = chain(q, 1.0, {0, 1, 2});
  const auto b = chain(q, 1.0, {2, 0, 1});
  CHECK(max_abs(a.mu_tilde - b.mu_tilde) < 1e-12);
  CHECK(max_abs(a.sigma_tilde - b.sigma_tilde) < 1e-12);
}

TEST_CASE("each update shrinks the covariance") {
  const auto q = pauli_qubit(5);
  GaussianState st = init_prior(q.cs, 1.0);
  for (std::size_t i = 0; i < q.settings.size(); ++i) {
    const GaussianState next = kalman_update(st, q.settings[i], q.records[i]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(st.sigma_tilde - next.sigma_tilde));
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    st = next;
  }
}

TEST_CASE("addition form agrees with the projector form") {
  const auto q = pauli_qubit(6);
  GaussianState st = init_prior(q.cs, 1.0);
  UntildedGaussian un{st.mean(), st.covariance()};
  for (std::size_t i = 0; i < q.settings.size(); ++i) {
    st = kalman_update(st, q.settings[i], q.records[i]);
    un = kalman_update_projector_form(un, *q.cs, q.settings[i], q.records[i]);
    CHECK(max_abs(st.mean() - un.mean) < 1e-10);
    CHECK(max_abs(st.covariance() - un.cov) < 1e-10);
  }
}

TEST_CASE("removing the prior recovers the infinite-prior posterior") {
  const auto q = pauli_qubit(7);
  const double b = 0.7;
  const GaussianState st = chain(q, b, {0, 1, 2});
  const GaussianState corrected = correct_prior(st, b);
  const GaussianState direct = infinite_prior_posterior(q.cs, q.settings, q.records);
  CHECK(max_abs(corrected.mu_tilde - direct.mu_tilde) < 1e-9);
  CHECK(max_abs(corrected.sigma_tilde - direct.sigma_tilde) < 1e-9);
  // A smaller width than the prior cannot be removed.
  CHECK_THROWS_AS(correct_prior(st, 1e-6), Error);
}

TEST_CASE("variance cap") {
  CHECK(variance_cap_b_prime(1.0, 4.0) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(variance_cap_b_prime(1.0, 0.5), Error);
}

TEST_CASE("single shot equals the infinite-prior posterior of one setting") {
  const auto q = pauli_qubit(8);
  // Pool the three Pauli settings into one scalar-complete six-outcome setting.
  std::vector<CMatrix> pooled;
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      pooled.push_back(q.settings[i].povm[j]);
      counts.push_back(q.records[i].counts[j]);
    }
  }
  const auto setting = build_setting(pooled, *q.cs);
  CHECK(setting.scalar_complete());
  CHECK(setting.m_max == doctest::Approx(3.0));
  const auto rec = pulsed_record(counts);
  const auto a = single_shot_posterior(q.cs, setting, rec);
  const auto b = infinite_prior_posterior(q.cs, {setting}, {rec});
  CHECK(max_abs(a.mu_tilde - b.mu_tilde) == 0.0);
  CHECK(std::abs(mat(a.mean()).trace() - Complex(1.0)) < 1e-12);
}

TEST_CASE("least squares") {
  const auto q = pauli_qubit(9, 2000000);
  const CMatrix ls = least_squares_baseline(q.settings, q.records);
  const CMatrix rho = ls / ls.trace();
  CHECK(max_abs(rho - q.truth) < 5e-3);
  // Only the Z basis: informationally incomplete.
  CHECK_THROWS_AS(least_squares_baseline({q.settings[2]}, {q.records[2]}), Error);
}

TEST_CASE("record length must match") {
  const auto q = pauli_qubit(10);
  const GaussianState st = init_prior(q.cs);
  CHECK_THROWS_AS(kalman_update(st, q.settings[0], pulsed_record({1, 2, 3})), Error);
  CHECK_THROWS_AS(init_prior(q.cs, 0.0), Error);
}
