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

// Ready-made measurement families and ground-truth models used by the CLI
// presets, the tests and the acceptance suite.

#ifndef KFTOMO_MODELS_H_
#define KFTOMO_MODELS_H_

#include <string>
#include <vector>

#include "kftomo/kalman.h"
#include "kftomo/physical.h"
#include "kftomo/rng.h"

namespace kftomo::models {

// Eigenprojectors of X, Y and Z on one qubit, one setting each.
std::vector<std::vector<CMatrix>> pauli_settings();

// Single-qubit polarization states H, V, D, A, R, L.
CVector polarization_ket(char label);

// The 36 two-qubit product projectors in the order HH, HV, VH, VV, HD, HA,
// VD, VA, HR, HL, VR, VL, DH, ..., LL. They sum to 9 times the identity.
std::vector<CMatrix> two_qubit_projectors();
std::vector<std::string> two_qubit_labels();

// (|HH> + |VV>)/sqrt(2) as a density matrix.
CMatrix bell_state();

// Random density matrix: Ginibre construction with the given rank.
CMatrix random_density(int dim, int rank, Rng& rng);

// Diagonal POVM family: `elements` diagonal vectors of length `depth`,
// stored element-major at index k * depth + n, each column summing to one.
struct DiagonalFamily {
  int elements = 9;
  int depth = 20;

  int size() const { return elements * depth; }
  std::vector<std::vector<int>> groups() const;
};

ConstraintSubspaces diagonal_constraints(const DiagonalFamily& fam);
PhysicalSetSpec diagonal_physical_set(const DiagonalFamily& fam);
// Setting probing the family with photon-number weights w (length depth).
MeasurementSetting diagonal_setting(const DiagonalFamily& fam, const RVector& weights,
                                    const ConstraintSubspaces& cs);

// Poisson weights of a coherent state, renormalized inside the truncation.
RVector coherent_weights(double alpha, int depth);

// Click statistics of a detector bank: each photon is detected with
// efficiency eta and lands on one of `detectors` uniformly; element k is the
// probability that exactly k detectors fire.
RVector detector_bank_truth(int detectors, double eta, int depth);

}  // namespace kftomo::models

#endif  // KFTOMO_MODELS_H_
