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

#include <cstddef>

#include "synthpose/simd/kernels.hpp"

namespace synthpose::simd::detail {

// Index of the neighbor of `i` in direction `step` (+1/-1) on an axis of length n.
inline std::size_t neighbor_row(std::size_t i, std::size_t n, int step, Boundary bc) {
  if (step < 0) {
    if (i > 0) return i - 1;
    return bc == Boundary::kPeriodic ? n - 1 : 0;
  }
  if (i + 1 < n) return i + 1;
  return bc == Boundary::kPeriodic ? 0 : n - 1;
}

// Shared evaluation order so vector variants can match bit for bit.
inline double stencil(double center, double up, double down, double left, double right,
                      double alpha) {
  const double s = (up + down) + (left + right);
  return center + alpha * (s - 4.0 * center);
}

}  // namespace synthpose::simd::detail
