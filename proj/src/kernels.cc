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

#include "kftomo/kernels.h"

#include <atomic>
#include <vector>

#include "kftomo/error.h"

namespace kftomo::kernels {

namespace scalar {

void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out) {
  std::vector<double> y(n);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) y[i] = points[i * stride + k] - c[i];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += p[i * n + j] * y[j];
      acc += y[i] * row;
    }
    out[k] = acc;
  }
}

void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out) {
  const double nd = n_runs + static_cast<double>(d);
  for (std::size_t k = 0; k < count; ++k) {
    const std::int32_t* f = counts + k * d;
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += p[i] * p[i] / (f[i] + 1.0);
    out[k] = (nd + 1.0) * (nd * s - 1.0);
  }
}

double sum_sq_adjacent_diff(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t = x[i + 1] - x[i];
    s += t * t;
  }
  return s;
}

}  // namespace scalar

#ifndef KFTOMO_HAVE_AVX2
namespace avx2 {
void quadratic_form_batch(const double*, const double*, std::size_t, const double*, std::size_t,
                          std::size_t, double*) {
  throw Error(ErrorCode::kInvalidArgument, "AVX2 kernels not compiled in");
}
void wald_statistic_batch(const double*, std::size_t, const std::int32_t*, std::size_t, double,
                          double*) {
  throw Error(ErrorCode::kInvalidArgument, "AVX2 kernels not compiled in");
}
double sum_sq_adjacent_diff(const double*, std::size_t) {
  throw Error(ErrorCode::kInvalidArgument, "AVX2 kernels not compiled in");
}
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(KFTOMO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar};
  return slot;
}

}  // namespace

bool backend_available(Backend b) {
  return b == Backend::kScalar || (b == Backend::kAvx2 && cpu_has_avx2());
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("backend unavailable: ") + backend_name(b));
  }
  backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::kAvx2 ? "avx2" : "scalar"; }

void quadratic_form_batch(const double* p, const double* c, std::size_t n, const double* points,
                          std::size_t stride, std::size_t count, double* out) {
  if (active_backend() == Backend::kAvx2) {
    avx2::quadratic_form_batch(p, c, n, points, stride, count, out);
  } else {
    scalar::quadratic_form_batch(p, c, n, points, stride, count, out);
  }
}

void wald_statistic_batch(const double* p, std::size_t d, const std::int32_t* counts,
                          std::size_t count, double n_runs, double* out) {
  if (active_backend() == Backend::kAvx2) {
    avx2::wald_statistic_batch(p, d, counts, count, n_runs, out);
  } else {
    scalar::wald_statistic_batch(p, d, counts, count, n_runs, out);
  }
}

double sum_sq_adjacent_diff(const double* x, std::size_t n) {
  if (active_backend() == Backend::kAvx2) return avx2::sum_sq_adjacent_diff(x, n);
  return scalar::sum_sq_adjacent_diff(x, n);
}

}  // namespace kftomo::kernels
