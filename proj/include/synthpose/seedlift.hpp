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

// From a few annotated 2D poses to 3D seed poses: scale from the head
// triangle, depth by Pythagoras along the kinematic chain, and selection of
// high-variance candidate seed sets.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "synthpose/random.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

// Pixel keypoints (x right, y down) and, per non-root joint, whether it sits
// in front of (+1, toward the camera) or behind (-1) its kinematic parent.
// signs[0] is ignored; 0 marks a missing annotation.
struct AnnotatedPose2D {
  std::string image_ref;
  std::string layout_id;
  std::vector<Vec2> keypoints_px;
  std::vector<int> signs;
};

struct ScaleSolution {
  double lambda = 0.0;  // pixels per unit AB
  double d_b = 0.0;     // |depth(B) - depth(A)| / AB
  double d_c = 0.0;     // |depth(C) - depth(A)| / AB
  bool same_side = true;  // B and C lie on the same side of A in depth
  bool both_roots_valid = false;  // larger lambda was taken
  double other_lambda = 0.0;      // the discarded root when both_roots_valid
};

// Throws NoRealSolution when the three distances cannot come from the rigid
// triangle under scaled orthographic projection.
ScaleSolution solve_scale(double ab_px, double ac_px, double bc_px, const HeadTriangleSpec& spec);

struct LiftResult {
  ScaleSolution scale;
  double lambda_prop = 0.0;      // pixels per unit AB (== scale.lambda)
  double pixels_per_metre = 0.0;
  Pose3D pose;                   // root-centred, metres
  std::vector<bool> clamped;     // per joint, joint 0 always false
};

// Throws MissingSign, NoRealSolution, Error(kShapeMismatch).
LiftResult lift(const AnnotatedPose2D& pose, const JointLayout& layout);
LiftResult lift(const AnnotatedPose2D& pose, const JointLayout& layout, const HeadTriangleSpec& spec);

struct SeedSet {
  std::vector<std::size_t> indices;  // ascending
  double total_variance = 0.0;
};

struct SeedSelectionOptions {
  std::size_t candidates = 1000;
  std::size_t set_size = 10;
  std::size_t keep = 10;
};

// Sum of per-coordinate population variances over the set; poses are
// root-centred and Frobenius-normalised first.
double total_variance(std::span<const Pose2D> dataset, std::span<const std::size_t> indices);

// Draws `candidates` random sets, drops duplicates and returns up to `keep`
// of them by descending total variance. Throws Error(kDatasetTooSmall).
std::vector<SeedSet> select_seed_sets(std::span<const Pose2D> dataset, const SeedSelectionOptions& options,
                                      Rng& rng);

}  // namespace synthpose
