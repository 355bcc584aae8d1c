// Copyright 2026 The synthpose Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "synthpose/simd/kernels.hpp"
#include "stencil_common.hpp"

namespace synthpose::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

// Four output columns at a time share each load of the `a` row.
void gemm_nt_avx2(const double* a, const double* b, const double* bias, double* c, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ar = a + i * k;
    double* cr = c + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + (j + 0) * k;
      const double* b1 = b + (j + 1) * k;
      const double* b2 = b + (j + 2) * k;
      const double* b3 = b + (j + 3) * k;
      __m256d s0 = _mm256_setzero_pd();
      __m256d s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd();
      __m256d s3 = _mm256_setzero_pd();
      std::size_t l = 0;
      for (; l + 4 <= k; l += 4) {
        const __m256d va = _mm256_loadu_pd(ar + l);
        s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + l), s0);
        s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + l), s1);
        s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + l), s2);
        s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + l), s3);
      }
      double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
      for (; l < k; ++l) {
        r0 += ar[l] * b0[l];
        r1 += ar[l] * b1[l];
        r2 += ar[l] * b2[l];
        r3 += ar[l] * b3[l];
      }
      cr[j + 0] = (bias ? bias[j + 0] : 0.0) + r0;
      cr[j + 1] = (bias ? bias[j + 1] : 0.0) + r1;
      cr[j + 2] = (bias ? bias[j + 2] : 0.0) + r2;
      cr[j + 3] = (bias ? bias[j + 3] : 0.0) + r3;
    }
    for (; j < n; ++j) cr[j] = (bias ? bias[j] : 0.0) + dot_avx2(ar, b + j * k, k);
  }
}

void gemm_nn_acc_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    double* cr = c + i * k;
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_avx2(s, b + l * k, cr, k);
    }
  }
}

void gemm_tn_acc_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* br = b + i * k;
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_avx2(s, br, c + l * k, k);
    }
  }
}

// Interior columns are vectorized; the two edge columns go through the
// scalar path so boundary handling stays in one place. No FMA here: the
// result must match the scalar kernel exactly.
void laplacian_step_avx2(const double* in, double* out, std::size_t rows, std::size_t cols,
                         double alpha, Boundary row_bc, Boundary col_bc) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d four = _mm256_set1_pd(4.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* up = in + detail::neighbor_row(r, rows, -1, row_bc) * cols;
    const double* down = in + detail::neighbor_row(r, rows, +1, row_bc) * cols;
    const double* mid = in + r * cols;
    double* o = out + r * cols;
    auto edge = [&](std::size_t c) {
      const double left = mid[detail::neighbor_row(c, cols, -1, col_bc)];
      const double right = mid[detail::neighbor_row(c, cols, +1, col_bc)];
      o[c] = detail::stencil(mid[c], up[c], down[c], left, right, alpha);
    };
    if (cols < 3) {
      for (std::size_t c = 0; c < cols; ++c) edge(c);
      continue;
    }
    edge(0);
    std::size_t c = 1;
    for (; c + 4 <= cols - 1; c += 4) {
      const __m256d center = _mm256_loadu_pd(mid + c);
      const __m256d vu = _mm256_loadu_pd(up + c);
      const __m256d vd = _mm256_loadu_pd(down + c);
      const __m256d vl = _mm256_loadu_pd(mid + c - 1);
      const __m256d vr = _mm256_loadu_pd(mid + c + 1);
      const __m256d s = _mm256_add_pd(_mm256_add_pd(vu, vd), _mm256_add_pd(vl, vr));
      const __m256d lap = _mm256_sub_pd(s, _mm256_mul_pd(four, center));
      _mm256_storeu_pd(o + c, _mm256_add_pd(center, _mm256_mul_pd(va, lap)));
    }
    for (; c < cols - 1; ++c) edge(c);
    edge(cols - 1);
  }
}

void sq_distances_avx2(const double* query, const double* points, std::size_t count,
                       std::size_t dim, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = points + i * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t d = 0;
    for (; d + 4 <= dim; d += 4) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(query + d), _mm256_loadu_pd(p + d));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    double s = hsum(acc);
    for (; d < dim; ++d) {
      const double diff = query[d] - p[d];
      s += diff * diff;
    }
    out[i] = s;
  }
}

void adam_update_avx2(double* param, const double* grad, double* m, double* v, std::size_t n,
                      const AdamCoefficients& c) {
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(omb1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d step =
        _mm256_mul_pd(lr, _mm256_div_pd(m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps)));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
  }
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    param[i] -= c.lr * (m_hat / (std::sqrt(v_hat) + c.eps));
  }
}

constexpr Kernels kAvx2{
    Isa::kAvx2,      dot_avx2,           axpy_avx2,         gemm_nt_avx2,
    gemm_nn_acc_avx2, gemm_tn_acc_avx2, laplacian_step_avx2, sq_distances_avx2,
    adam_update_avx2,
};

}  // namespace

namespace detail {
const Kernels& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace synthpose::simd
