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

#pragma once

// Data-parallel inner loops shared by the generator, the lifter and the
// metrics. Every kernel has a scalar reference implementation; vector
// variants are selected once per process based on the running CPU.
//
// Contract between variants:
//   laplacian_step, adam_update      bit-identical to scalar
//   dot, gemm_*, sq_distances        equal up to summation reordering

#include <cstddef>
#include <string_view>
#include <vector>

namespace synthpose::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

enum class Boundary {
  kReflect,   // zero-flux: ghost cell mirrors the edge cell
  kPeriodic,  // wraps around, for circular axes
};

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct Kernels {
  Isa isa;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // c[i][j] = bias[j] + sum_k a[i][k] * b[j][k]
  // a: m x k, b: n x k, c: m x n, all row-major. bias may be null.
  void (*gemm_nt)(const double* a, const double* b, const double* bias, double* c,
                  std::size_t m, std::size_t n, std::size_t k);

  // c[i][j] += sum_l a[i][l] * b[l][j]      a: m x n, b: n x k, c: m x k
  void (*gemm_nn_acc)(const double* a, const double* b, double* c, std::size_t m,
                      std::size_t n, std::size_t k);

  // c[l][j] += sum_i a[i][l] * b[i][j]      a: m x n, b: m x k, c: n x k
  void (*gemm_tn_acc)(const double* a, const double* b, double* c, std::size_t m,
                      std::size_t n, std::size_t k);

  // One explicit 5-point step: out = in + alpha * Laplacian(in).
  void (*laplacian_step)(const double* in, double* out, std::size_t rows, std::size_t cols,
                         double alpha, Boundary row_bc, Boundary col_bc);

  // out[i] = |query - points[i]|^2 for `count` points of dimension `dim`.
  void (*sq_distances)(const double* query, const double* points, std::size_t count,
                       std::size_t dim, double* out);

  void (*adam_update)(double* param, const double* grad, double* m, double* v, std::size_t n,
                      const AdamCoefficients& c);
};

const Kernels& scalar_kernels();

// Null when the variant is not compiled in or the CPU lacks the extension.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Every variant usable on this machine, scalar first.
std::vector<const Kernels*> available_kernels();

// Best available variant. SYNTHPOSE_SIMD=scalar|avx2|neon overrides the choice
// (an unavailable request falls back to scalar). Resolved once.
const Kernels& active_kernels();

}  // namespace synthpose::simd
