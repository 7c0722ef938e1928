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

// Hot loops with a scalar reference and an AVX2/FMA variant. The active
// backend is picked once from CPUID and can be pinned for testing.

#ifndef KFTOMO_KERNELS_H_
#define KFTOMO_KERNELS_H_

#include <cstddef>
#include <cstdint>

namespace kftomo::kernels {

enum class Backend { kScalar, kAvx2 };

bool backend_available(Backend b);
Backend active_backend();
// Throws kInvalidArgument if the backend is not available on this CPU.
void set_backend(Backend b);
const char* backend_name(Backend b);

// out[k] = (x_k - c)^T P (x_k - c) for `count` points stored
// structure-of-arrays: coordinate i of point k is points[i * stride + k].
// P is n x n, row-major and symmetric.
void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out);

// Wald statistic (N+d+1)((N+d) sum_i p_i^2/(f_i+1) - 1) for `count` count
// vectors stored contiguously (row k at counts + k*d), each summing to n_runs.
void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out);

// sum_i (x[i+1] - x[i])^2.
double sum_sq_adjacent_diff(const double* x, std::size_t n);

namespace scalar {
void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out);
void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out);
double sum_sq_adjacent_diff(const double* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out);
void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out);
double sum_sq_adjacent_diff(const double* x, std::size_t n);
}  // namespace avx2

}  // namespace kftomo::kernels

#endif  // KFTOMO_KERNELS_H_
