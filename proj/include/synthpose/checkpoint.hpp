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

// Lifter checkpoints, little-endian:
//   "SPCK" | u32 version | u32 joints | u32 width | u32 blocks | u32 activation
//   u32 layer_count, then (u32 in, u32 out) per layer
//   u64 n | f64[n] weights
//   f64 beta1 | f64 beta2 | f64 eps | i64 step | f64[n] m | f64[n] v

#include <filesystem>
#include <string>
#include <string_view>

#include "synthpose/lifter.hpp"

namespace synthpose {

inline constexpr unsigned kCheckpointVersion = 1;

struct Checkpoint {
  LifterParams params;
  OptimizerState optimizer;
};

std::string encode_checkpoint(const LifterParams& params, const OptimizerState& optimizer);
// Throws Error(kFormat) on any header, shape or length problem.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const LifterParams& params,
                     const OptimizerState& optimizer);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace synthpose
