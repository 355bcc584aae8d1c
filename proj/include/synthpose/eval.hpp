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

// Evaluation: protocol-1 MPJPE with optional Frobenius rescale, PCK at half
// the head length, and k-NN precision/recall between pose sets.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "synthpose/simd/kernels.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

// Inputs in metres; both poses are root-aligned (joint 0 subtracted) first.
// With `rescale`, pred is scaled to the Frobenius norm of gt. Returns mm.
double mpjpe(const Pose3D& pred, const Pose3D& gt, bool rescale = true);

// Fraction of non-root joints with error <= head_length / 2 (same alignment
// and rescale convention as mpjpe). The root is excluded because alignment
// zeroes its error.
double pck(const Pose3D& pred, const Pose3D& gt, double head_length, bool rescale = true);

// Head length used for PCK: |gt[head.a] - gt[head.c]| (head top to neck).
double head_length(const Pose3D& gt, const JointLayout& layout);

struct EvalReport {
  double mpjpe_mm = 0.0;
  double pck = 0.0;
  std::size_t samples = 0;
  bool rescaled = true;
  std::string protocol = "P1";
  std::string layout_id;
};

EvalReport evaluate(std::span<const Pose3D> preds, std::span<const Pose3D> gts, const JointLayout& layout,
                    bool rescale = true);

struct PRReport {
  double precision = 0.0;
  double recall = 0.0;
  int k = 10;
  std::size_t real_count = 0;
  std::size_t synth_count = 0;
};

// Squared distance from each point to its k-th nearest other point of the
// same set. `points` is count x dim.
std::vector<double> knn_sq_radii(std::span<const double> points, std::size_t count, std::size_t dim, int k,
                                 const simd::Kernels& kernels);

// Precision: share of synth poses inside some real k-NN ball; recall: share
// of real poses inside some synth k-NN ball. Poses are root-centred and
// Frobenius-normalised first. Throws Error(kSetTooSmall) when a set has
// k or fewer poses.
PRReport precision_recall(std::span<const Pose2D> real, std::span<const Pose2D> synth, int k = 10);
PRReport precision_recall(std::span<const Pose2D> real, std::span<const Pose2D> synth, int k,
                          const simd::Kernels& kernels);

std::string to_json(const EvalReport& r);
std::string to_json(const PRReport& r);

}  // namespace synthpose
