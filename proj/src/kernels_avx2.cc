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

// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// CPUID check, so nothing here may be inlined into generic code.

#include <immintrin.h>

#include <vector>

#include "kftomo/kernels.h"

namespace kftomo::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out) {
  // Four points per lane group: y_i holds coordinate i of points k..k+3.
  std::vector<__m256d> y(n);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = _mm256_sub_pd(_mm256_loadu_pd(points + i * stride + k), _mm256_set1_pd(c[i]));
    }
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      __m256d row = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        row = _mm256_fmadd_pd(_mm256_set1_pd(p[i * n + j]), y[j], row);
      }
      acc = _mm256_fmadd_pd(y[i], row, acc);
    }
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < count) {
    // Tail points are laid out with the same stride; shift the base pointer.
    scalar::quadratic_form_batch(p, c, n, points + k, stride, count - k, out + k);
  }
}

void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out) {
  const double nd = n_runs + static_cast<double>(d);
  std::vector<double> p2(d);
  for (std::size_t i = 0; i < d; ++i) p2[i] = p[i] * p[i];
  const __m256d one = _mm256_set1_pd(1.0);
  const __m128i lane_rows = _mm_setr_epi32(0, 1, 2, 3);
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    // Gather f_i for four consecutive records.
    const __m128i idx = _mm_mullo_epi32(lane_rows, _mm_set1_epi32(static_cast<int>(d)));
    const std::int32_t* base = counts + k * d;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t i = 0; i < d; ++i) {
      const __m128i f = _mm_i32gather_epi32(base + i, idx, 4);
      const __m256d fd = _mm256_add_pd(_mm256_cvtepi32_pd(f), one);
      s = _mm256_add_pd(s, _mm256_div_pd(_mm256_set1_pd(p2[i]), fd));
    }
    const __m256d z = _mm256_mul_pd(_mm256_set1_pd(nd + 1.0),
                                    _mm256_fmsub_pd(_mm256_set1_pd(nd), s, one));
    _mm256_storeu_pd(out + k, z);
  }
  if (k < count) scalar::wald_statistic_batch(p, d, counts + k * d, count - k, n_runs, out + k);
}

double sum_sq_adjacent_diff(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t m = n - 1;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(t, t, acc);
  }
  double s = hsum(acc);
  for (; i < m; ++i) {
    const double t = x[i + 1] - x[i];
    s += t * t;
  }
  return s;
}

}  // namespace kftomo::kernels::avx2
