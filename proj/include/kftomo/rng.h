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

// Counter-based SplitMix64 stream. The state after n draws is seed + n*golden,
// so a (seed, stream) pair maps to an independent, portable sequence.

#ifndef KFTOMO_RNG_H_
#define KFTOMO_RNG_H_

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace kftomo {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  // Derives a stream that does not overlap the parent for any practical length.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1), never returns 0.
  double uniform_open();
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

// Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.
Eigen::MatrixXcd haar_unitary(int n, Rng& rng);

}  // namespace kftomo

#endif  // KFTOMO_RNG_H_
