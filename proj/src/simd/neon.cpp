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

// AArch64 variant. Advanced SIMD is mandatory on AArch64, so no runtime probe.

#include <arm_neon.h>

#include <cmath>

#include "synthpose/simd/kernels.hpp"
#include "stencil_common.hpp"

namespace synthpose::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemm_nt_neon(const double* a, const double* b, const double* bias, double* c, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] = (bias ? bias[j] : 0.0) + dot_neon(a + i * k, b + j * k, k);
    }
  }
}

void gemm_nn_acc_neon(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_neon(s, b + l * k, c + i * k, k);
    }
}

void gemm_tn_acc_neon(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_neon(s, b + i * k, c + l * k, k);
    }
}

void laplacian_step_neon(const double* in, double* out, std::size_t rows, std::size_t cols,
                         double alpha, Boundary row_bc, Boundary col_bc) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t four = vdupq_n_f64(4.0);
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
    for (; c + 2 <= cols - 1; c += 2) {
      const float64x2_t center = vld1q_f64(mid + c);
      const float64x2_t s = vaddq_f64(vaddq_f64(vld1q_f64(up + c), vld1q_f64(down + c)),
                                      vaddq_f64(vld1q_f64(mid + c - 1), vld1q_f64(mid + c + 1)));
      const float64x2_t lap = vsubq_f64(s, vmulq_f64(four, center));
      vst1q_f64(o + c, vaddq_f64(center, vmulq_f64(va, lap)));
    }
    for (; c < cols - 1; ++c) edge(c);
    edge(cols - 1);
  }
}

void sq_distances_neon(const double* query, const double* points, std::size_t count,
                       std::size_t dim, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = points + i * dim;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t d = 0;
    for (; d + 2 <= dim; d += 2) {
      const float64x2_t diff = vsubq_f64(vld1q_f64(query + d), vld1q_f64(p + d));
      acc = vfmaq_f64(acc, diff, diff);
    }
    double s = vaddvq_f64(acc);
    for (; d < dim; ++d) {
      const double diff = query[d] - p[d];
      s += diff * diff;
    }
    out[i] = s;
  }
}

void adam_update_neon(double* param, const double* grad, double* m, double* v, std::size_t n,
                      const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const float64x2_t b1 = vdupq_n_f64(c.beta1), b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(one_minus_b1), omb2 = vdupq_n_f64(one_minus_b2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1), bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.lr), eps = vdupq_n_f64(c.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, g));
    const float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(g, g)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, bc1);
    const float64x2_t v_hat = vdivq_f64(vi, bc2);
    const float64x2_t step = vmulq_f64(lr, vdivq_f64(m_hat, vaddq_f64(vsqrtq_f64(v_hat), eps)));
    vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    param[i] -= c.lr * ((m[i] / c.bias_correction1) / (std::sqrt(v[i] / c.bias_correction2) + c.eps));
  }
}

constexpr Kernels kNeon{
    Isa::kNeon,      dot_neon,           axpy_neon,         gemm_nt_neon,
    gemm_nn_acc_neon, gemm_tn_acc_neon, laplacian_step_neon, sq_distances_neon,
    adam_update_neon,
};

}  // namespace

namespace detail {
const Kernels& neon_table() { return kNeon; }
}  // namespace detail

}  // namespace synthpose::simd
