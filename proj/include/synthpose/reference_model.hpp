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

// Parametric stand-in for motion-capture data: a mixture of activities
// (standing, walking, sitting, reaching, bending) with random body yaw and
// per-joint angular noise. Bone lengths are exact and the head keypoints
// always form the layout's head triangle, so scale recovery is exact on
// its orthographic projections.

#include <vector>

#include "synthpose/random.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

struct ReferenceOptions {
  double angle_noise = 0.08;  // rad, std of theta/phi jitter
  double yaw_range = 3.14159265358979323846;  // body yaw ~ U(-range, range)
};

class ReferenceModel {
 public:
  explicit ReferenceModel(const JointLayout& layout, ReferenceOptions options = {});

  const JointLayout& layout() const { return layout_; }
  SphericalParams sample_params(Rng& rng) const;
  Pose3D sample(Rng& rng) const;
  std::vector<Pose3D> sample(std::size_t count, Rng& rng) const;

 private:
  Pose3D canonical(Rng& rng) const;
  const JointLayout& layout_;
  ReferenceOptions options_;
  bool h36m_;
};

// Polar angle of the head-top joint in the frame of the B bone that closes
// the head triangle: pi minus the triangle's angle at B.
double head_apex_theta(const HeadTriangleSpec& head);

}  // namespace synthpose
