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

// Skeleton layouts and the bijection between global Cartesian joints and
// per-bone local spherical parameters.
//
// Conventions (all poses are root-centred, metres):
//   world axes   x = subject's left (image right), y = up, z = toward camera
//   root frame   z = (0,0,1), x = (0,1,0), y = z cross x = (-1,0,0); bones
//                leaving the pelvis are expressed in this fixed frame
//   bone frames  a joint c is placed in the frame of its parent bone p:
//                z = unit(X[p] - X[p(p)]), x = the parent's frame x-axis carried
//                along by the minimal rotation taking the old z onto the new
//                one, then Gram-Schmidt against z; y = z cross x
//   spherical    v = rho * (sin t cos f * x + sin t sin f * y + cos t * z)
//   root triple  the pelvis slot repeats the triple of `root_anchor` (the
//                pelvis->spine bone); it conditions the Markov tree but is
//                not used for placement

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthpose/vec3.hpp"

namespace synthpose {

enum class Component : int { kRho = 0, kTheta = 1, kPhi = 2 };
inline constexpr int kComponentCount = 3;
const char* component_name(int component);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

struct RangeLimits {
  std::array<Interval, kComponentCount> bounds;  // rho, theta, phi
  const Interval& operator[](int component) const { return bounds[component]; }
  Interval& operator[](int component) { return bounds[component]; }
  bool operator==(const RangeLimits&) const = default;
};

struct Spherical {
  std::array<double, kComponentCount> values{};  // rho, theta, phi
  double rho() const { return values[0]; }
  double theta() const { return values[1]; }
  double phi() const { return values[2]; }
  double operator[](int component) const { return values[component]; }
  double& operator[](int component) { return values[component]; }
};

struct SphericalParams {
  std::vector<Spherical> joints;
};

struct Pose3D {
  std::vector<Vec3> joints;
  std::size_t size() const { return joints.size(); }
};

struct Pose2D {
  std::vector<Vec2> joints;
  std::size_t size() const { return joints.size(); }
};

struct LocalFrame {
  Vec3 x;
  Vec3 y;
  Vec3 z;
};

// Head-top / nose / neck triangle used for scale recovery. AB is the unit
// length; BC = alpha * AB and AC = beta * AB.
struct HeadTriangleSpec {
  int a = 0;  // head top
  int b = 0;  // nose
  int c = 0;  // neck
  double alpha = 1.0;
  double beta = 5.0 / 3.0;
  double ab_length = 0.0;  // metres
  bool operator==(const HeadTriangleSpec&) const = default;
};

// Plain description of a layout, as read from a layout file.
struct LayoutSpec {
  std::string id;
  std::vector<std::string> joint_names;
  std::vector<int> kinematic_parent;  // -1 for the root
  std::vector<int> markov_parent;     // -1 for the root
  std::vector<double> bone_lengths;   // J-1 entries, joint 1..J-1
  std::vector<RangeLimits> range_limits;  // J entries; entry 0 bounds the root triple
  int root_anchor = 0;
  HeadTriangleSpec head;
  bool operator==(const LayoutSpec&) const = default;
};

class JointLayout {
 public:
  // Validates the spec; throws Error(kInvalidLayout) describing the first problem.
  explicit JointLayout(LayoutSpec spec);

  const LayoutSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }
  int joint_count() const { return static_cast<int>(spec_.joint_names.size()); }
  int kinematic_parent(int joint) const { return spec_.kinematic_parent[joint]; }
  int markov_parent(int joint) const { return spec_.markov_parent[joint]; }
  double bone_length(int joint) const { return spec_.bone_lengths[joint - 1]; }
  const RangeLimits& limits(int joint) const { return spec_.range_limits[joint]; }
  int root_anchor() const { return spec_.root_anchor; }
  const HeadTriangleSpec& head() const { return spec_.head; }

  // Root first; every joint appears after its parent.
  const std::vector<int>& kinematic_order() const { return kinematic_order_; }
  const std::vector<int>& markov_order() const { return markov_order_; }

  // FNV-1a over the canonical layout serialization.
  std::uint64_t hash() const { return hash_; }

 private:
  LayoutSpec spec_;
  std::vector<int> kinematic_order_;
  std::vector<int> markov_order_;
  std::uint64_t hash_ = 0;
};

// Built-in layouts: 17-joint Human3.6M and 24-joint SMPL.
const JointLayout& h36m17_layout();
const JointLayout& smpl24_layout();
std::vector<const JointLayout*> builtin_layouts();
// Returns nullptr for unknown ids.
const JointLayout* find_builtin_layout(const std::string& id);

// Fixed frame for bones leaving the pelvis.
LocalFrame root_frame();

// z = unit(parent - grandparent); x = reference_up orthogonalised against z.
// Throws DegenerateFrame when the bone is shorter than 1e-12 or reference_up
// lies within 1e-6 rad of the bone direction.
LocalFrame local_frame(const Vec3& parent_pos, const Vec3& grandparent_pos,
                       const Vec3& reference_up);

// Direction with polar angle theta and azimuth phi in `frame`.
Vec3 spherical_direction(const LocalFrame& frame, double theta, double phi);

SphericalParams cart_to_spherical(const Pose3D& pose, const JointLayout& layout);
Pose3D spherical_to_cart(const SphericalParams& params, const JointLayout& layout);

// argument wrapped into [-pi, pi]
double wrap_angle(double a);
// |a - b| measured on the circle
double angle_distance(double a, double b);

}  // namespace synthpose
