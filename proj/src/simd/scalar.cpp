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

#include <cmath>

#include "synthpose/simd/kernels.hpp"
#include "stencil_common.hpp"

namespace synthpose::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemm_nt_scalar(const double* a, const double* b, const double* bias, double* c,
                    std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ar = a + i * k;
    double* cr = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      cr[j] = (bias ? bias[j] : 0.0) + dot_scalar(ar, b + j * k, k);
    }
  }
}

void gemm_nn_acc_scalar(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    double* cr = c + i * k;
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_scalar(s, b + l * k, cr, k);
    }
  }
}

void gemm_tn_acc_scalar(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* br = b + i * k;
    for (std::size_t l = 0; l < n; ++l) {
      const double s = a[i * n + l];
      if (s != 0.0) axpy_scalar(s, br, c + l * k, k);
    }
  }
}

void laplacian_step_scalar(const double* in, double* out, std::size_t rows, std::size_t cols,
                           double alpha, Boundary row_bc, Boundary col_bc) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* up = in + detail::neighbor_row(r, rows, -1, row_bc) * cols;
    const double* down = in + detail::neighbor_row(r, rows, +1, row_bc) * cols;
    const double* mid = in + r * cols;
    double* o = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      const double left = mid[detail::neighbor_row(c, cols, -1, col_bc)];
      const double right = mid[detail::neighbor_row(c, cols, +1, col_bc)];
      o[c] = detail::stencil(mid[c], up[c], down[c], left, right, alpha);
    }
  }
}

void sq_distances_scalar(const double* query, const double* points, std::size_t count,
                         std::size_t dim, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = points + i * dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = query[d] - p[d];
      s += diff * diff;
    }
    out[i] = s;
  }
}

void adam_update_scalar(double* param, const double* grad, double* m, double* v, std::size_t n,
                        const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    param[i] -= c.lr * (m_hat / (std::sqrt(v_hat) + c.eps));
  }
}

constexpr Kernels kScalar{
    Isa::kScalar,      dot_scalar,           axpy_scalar,         gemm_nt_scalar,
    gemm_nn_acc_scalar, gemm_tn_acc_scalar, laplacian_step_scalar, sq_distances_scalar,
    adam_update_scalar,
};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace synthpose::simd
