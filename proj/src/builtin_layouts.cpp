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
#include <numbers>

#include "synthpose/skeleton.hpp"

namespace synthpose {
namespace {

constexpr double kPi = std::numbers::pi;

// Angles are left at their full domains; bone lengths may vary by 20%.
std::vector<RangeLimits> default_limits(const std::vector<double>& bones, int anchor) {
  std::vector<RangeLimits> out(bones.size() + 1);
  for (std::size_t j = 1; j < out.size(); ++j) {
    const double l = bones[j - 1];
    out[j] = RangeLimits{{Interval{0.8 * l, 1.2 * l}, Interval{0.0, kPi}, Interval{-kPi, kPi}}};
  }
  out[0] = out[anchor];
  return out;
}

LayoutSpec h36m17_spec() {
  LayoutSpec s;
  s.id = "h36m17";
  s.joint_names = {"pelvis",    "right_hip",  "right_knee",     "right_ankle", "left_hip",
                   "left_knee", "left_ankle", "spine",          "thorax",      "nose",
                   "head_top",  "left_shoulder", "left_elbow",  "left_wrist",  "right_shoulder",
                   "right_elbow", "right_wrist"};
  s.kinematic_parent = {-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 9, 8, 11, 12, 8, 14, 15};
  // Left hip hangs off the root, the right hip off its counterpart; the left
  // shoulder is conditioned on the left hip and the right shoulder on the left.
  s.markov_parent = {-1, 4, 1, 2, 0, 4, 5, 0, 7, 8, 9, 4, 11, 12, 11, 14, 15};
  // Metres, proportions of a 1.70 m adult.
  s.bone_lengths = {0.133, 0.442, 0.442, 0.133, 0.442, 0.442, 0.233, 0.254,
                    0.115, 0.115, 0.151, 0.278, 0.251, 0.151, 0.278, 0.251};
  s.root_anchor = 7;
  s.range_limits = default_limits(s.bone_lengths, s.root_anchor);
  s.head = HeadTriangleSpec{10, 9, 8, 1.0, 5.0 / 3.0, 0.115};
  return s;
}

LayoutSpec smpl24_spec() {
  LayoutSpec s;
  s.id = "smpl24";
  s.joint_names = {"pelvis",      "left_hip",       "right_hip",     "spine1",      "left_knee",
                   "right_knee",  "spine2",         "left_ankle",    "right_ankle", "spine3",
                   "left_foot",   "right_foot",     "neck",          "left_collar", "right_collar",
                   "head",        "left_shoulder",  "right_shoulder", "left_elbow", "right_elbow",
                   "left_wrist",  "right_wrist",    "left_hand",     "right_hand"};
  s.kinematic_parent = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8,
                        9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  s.markov_parent = {-1, 0, 1, 0, 1, 2, 3, 4, 5, 6, 7, 8,
                     9, 1, 13, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  s.bone_lengths = {0.115, 0.115, 0.115, 0.380, 0.380, 0.135, 0.400, 0.400,
                    0.055, 0.135, 0.135, 0.215, 0.145, 0.145, 0.090, 0.100,
                    0.100, 0.260, 0.260, 0.250, 0.250, 0.085, 0.085};
  s.root_anchor = 3;
  s.range_limits = default_limits(s.bone_lengths, s.root_anchor);
  // head / neck / spine3; the neck bends ~30 degrees off the spine line.
  const double alpha = 0.215 / 0.090;
  const double beta = std::sqrt(1.0 + alpha * alpha + 2.0 * alpha * std::cos(kPi / 6.0));
  s.head = HeadTriangleSpec{15, 12, 9, alpha, beta, 0.090};
  return s;
}

}  // namespace

const JointLayout& h36m17_layout() {
  static const JointLayout layout(h36m17_spec());
  return layout;
}

const JointLayout& smpl24_layout() {
  static const JointLayout layout(smpl24_spec());
  return layout;
}

std::vector<const JointLayout*> builtin_layouts() { return {&h36m17_layout(), &smpl24_layout()}; }

const JointLayout* find_builtin_layout(const std::string& id) {
  for (const JointLayout* l : builtin_layouts())
    if (l->id() == id) return l;
  return nullptr;
}

}  // namespace synthpose
