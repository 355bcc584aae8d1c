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

// Histogram snapshots.
//
// Binary part, little-endian:
//   "PGH1" | u32 joint_count | u32 bins (= 50)
//   f64[3][bins]               root marginals (rho, theta, phi)
//   f64[bins][bins] x 3        per non-root joint in Markov order
// The JSON manifest next to it records the layout hash, the diffusion step
// and the rng seed of the run that produced it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "synthpose/posegen.hpp"

namespace synthpose {

struct SnapshotManifest {
  std::string layout_id;
  std::uint64_t layout_hash = 0;
  long step = 0;
  std::uint64_t rng_seed = 0;
};

std::string encode_histograms(const DistributionSet& dist);
// Fills the histograms of `dist` (built for the matching layout). Throws
// Error(kFormat) on a bad header or length.
void decode_histograms(std::string_view bytes, DistributionSet& dist);

std::string encode_manifest(const SnapshotManifest& m);
SnapshotManifest decode_manifest(std::string_view text);

// Writes <stem>.pgh and <stem>.json.
void save_snapshot(const std::filesystem::path& stem, const DistributionSet& dist,
                   std::uint64_t rng_seed);
// Rejects a manifest whose layout hash differs from `layout`.
DistributionSet load_snapshot(const std::filesystem::path& stem, const JointLayout& layout,
                              SnapshotManifest* manifest = nullptr);

}  // namespace synthpose
