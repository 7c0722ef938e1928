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

#include "kftomo/models.h"

#include <cmath>

#include "kftomo/error.h"
#include "kftomo/rng.h"

namespace kftomo::models {

namespace {

CMatrix projector(const CVector& ket) { return ket * ket.adjoint(); }

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

std::vector<std::vector<CMatrix>> pauli_settings() {
  std::vector<std::vector<CMatrix>> out;
  for (const auto& pair : {std::pair{'D', 'A'}, std::pair{'R', 'L'}, std::pair{'H', 'V'}}) {
    out.push_back({projector(polarization_ket(pair.first)), projector(polarization_ket(pair.second))});
  }
  return out;
}

CVector polarization_ket(char label) {
  const double s = 1.0 / std::sqrt(2.0);
  CVector k(2);
  switch (label) {
    case 'H': k << 1.0, 0.0; break;
    case 'V': k << 0.0, 1.0; break;
    case 'D': k << s, s; break;
    case 'A': k << s, -s; break;
    case 'R': k << s, Complex(0.0, s); break;
    case 'L': k << s, Complex(0.0, -s); break;
    default: throw Error(ErrorCode::kInvalidArgument, std::string("unknown polarization ") + label);
  }
  return k;
}

std::vector<std::string> two_qubit_labels() {
  // Blocks of four over basis pairs; inside a block the first qubit varies slowest.
  static const char* pairs[] = {"HV", "DA", "RL"};
  std::vector<std::string> out;
  for (const char* first : pairs) {
    for (const char* second : pairs) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) out.push_back(std::string{first[a], second[b]});
      }
    }
  }
  return out;
}

std::vector<CMatrix> two_qubit_projectors() {
  std::vector<CMatrix> out;
  for (const auto& l : two_qubit_labels()) {
    out.push_back(projector(kron(polarization_ket(l[0]), polarization_ket(l[1]))));
  }
  return out;
}

CMatrix bell_state() {
  CVector psi = CVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return projector(psi);
}

CMatrix random_density(int dim, int rank, Rng& rng) {
  CMatrix g(dim, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < dim; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

std::vector<std::vector<int>> DiagonalFamily::groups() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n) {
    for (int k = 0; k < elements; ++k) out[n].push_back(k * depth + n);
  }
  return out;
}

ConstraintSubspaces diagonal_constraints(const DiagonalFamily& fam) {
  RMatrix c = RMatrix::Zero(fam.depth, fam.size());
  for (int n = 0; n < fam.depth; ++n) {
    for (int k = 0; k < fam.elements; ++k) c(n, k * fam.depth + n) = 1.0;
  }
  const RVector x0 = RVector::Constant(fam.size(), 1.0 / fam.elements);
  return linear_constraints(c, x0);
}

PhysicalSetSpec diagonal_physical_set(const DiagonalFamily& fam) {
  PhysicalSetSpec spec;
  spec.kind = coordinate_orthant(fam.size(), fam.groups());
  return spec;
}

MeasurementSetting diagonal_setting(const DiagonalFamily& fam, const RVector& weights,
                                    const ConstraintSubspaces& cs) {
  if (weights.size() != fam.depth) {
    throw Error(ErrorCode::kDimensionMismatch, "probe weights do not match the truncation");
  }
  CMatrix h = CMatrix::Zero(fam.elements, fam.size());
  for (int k = 0; k < fam.elements; ++k) {
    h.block(k, k * fam.depth, 1, fam.depth) = weights.transpose().cast<Complex>();
  }
  const double total = weights.sum();
  return build_linear_setting(h, cs, total, total);
}

RVector coherent_weights(double alpha, int depth) {
  const double mean = alpha * alpha;
  RVector w(depth);
  for (int n = 0; n < depth; ++n) {
    w(n) = n == 0 ? std::exp(-mean) : std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  }
  return w / w.sum();
}

RVector detector_bank_truth(int detectors, double eta, int depth) {
  // occ(j, k): probability that j detected photons occupy exactly k detectors.
  RMatrix occ = RMatrix::Zero(depth, detectors + 1);
  occ(0, 0) = 1.0;
  for (int j = 1; j < depth; ++j) {
    for (int k = 0; k <= detectors; ++k) {
      double v = occ(j - 1, k) * k / detectors;
      if (k > 0) v += occ(j - 1, k - 1) * (detectors - k + 1.0) / detectors;
      occ(j, k) = v;
    }
  }
  RVector theta = RVector::Zero((detectors + 1) * depth);
  for (int m = 0; m < depth; ++m) {
    for (int j = 0; j <= m; ++j) {
      const double bin = std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0)) *
                         std::pow(eta, j) * std::pow(1.0 - eta, m - j);
      for (int k = 0; k <= detectors; ++k) theta(k * depth + m) += bin * occ(j, k);
    }
  }
  return theta;
}

}  // namespace kftomo::models
