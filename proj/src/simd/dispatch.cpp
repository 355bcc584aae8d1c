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

#include <cstdlib>
#include <string>

#include "synthpose/simd/kernels.hpp"

namespace synthpose::simd {

namespace detail {
#if defined(SYNTHPOSE_HAVE_AVX2)
const Kernels& avx2_table();
#endif
#if defined(SYNTHPOSE_HAVE_NEON)
const Kernels& neon_table();
#endif
}  // namespace detail

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const Kernels* avx2_kernels() {
#if defined(SYNTHPOSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(SYNTHPOSE_HAVE_NEON)
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

std::vector<const Kernels*> available_kernels() {
  std::vector<const Kernels*> out{&scalar_kernels()};
  if (const Kernels* k = avx2_kernels()) out.push_back(k);
  if (const Kernels* k = neon_kernels()) out.push_back(k);
  return out;
}

namespace {

const Kernels& resolve() {
  if (const char* env = std::getenv("SYNTHPOSE_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2") return avx2_kernels() ? *avx2_kernels() : scalar_kernels();
    if (want == "neon") return neon_kernels() ? *neon_kernels() : scalar_kernels();
  }
  if (const Kernels* k = avx2_kernels()) return *k;
  if (const Kernels* k = neon_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
  static const Kernels& chosen = resolve();
  return chosen;
}

}  // namespace synthpose::simd
