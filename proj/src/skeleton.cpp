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

#include "synthpose/skeleton.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "synthpose/error.hpp"
#include "synthpose/layout_io.hpp"

namespace synthpose {
namespace {

constexpr double kMinBone = 1e-12;
constexpr double kParallelAngle = 1e-6;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void invalid(const std::string& id, const std::string& msg) {
  throw Error(ErrorCode::kInvalidLayout, "layout '" + id + "': " + msg);
}

// BFS order of a parent array; empty when it is not a spanning tree rooted at 0.
std::vector<int> tree_order(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::vector<int>> children(n);
  for (int j = 1; j < n; ++j) {
    if (parent[j] < 0 || parent[j] >= n || parent[j] == j) return {};
    children[parent[j]].push_back(j);
  }
  if (n == 0 || parent[0] != -1) return {};
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const int j = q.front();
    q.pop();
    order.push_back(j);
    for (int c : children[j]) {
      if (seen[c]) return {};
      seen[c] = true;
      q.push(c);
    }
  }
  if (static_cast<int>(order.size()) != n) return {};
  return order;
}

Vec3 normalized(const Vec3& v) { return (1.0 / norm(v)) * v; }

// Minimal rotation taking unit `from` onto unit `to`, applied to `v`.
Vec3 transport(const Vec3& v, const Vec3& from, const Vec3& to) {
  const double c = dot(from, to);
  if (1.0 + c < 1e-9) return v;  // fold-back: v is already orthogonal to both
  return v - (dot(v, to) / (1.0 + c)) * (from + to);
}

LocalFrame child_frame(const Vec3& child, const Vec3& parent, const LocalFrame& parent_frame,
                       int joint) {
  const Vec3 d = child - parent;
  const double len = norm(d);
  if (!(len >= kMinBone)) throw DegenerateFrame(joint, "zero-length bone at joint " + std::to_string(joint));
  const Vec3 z = (1.0 / len) * d;
  const Vec3 candidates[] = {transport(parent_frame.x, parent_frame.z, z), Vec3{1, 0, 0},
                             Vec3{0, 1, 0}};
  for (const Vec3& ref : candidates) {
    try {
      return local_frame(child, parent, ref);
    } catch (const DegenerateFrame&) {
    }
  }
  throw DegenerateFrame(joint, "no usable reference axis at joint " + std::to_string(joint));
}

}  // namespace

const char* component_name(int component) {
  static const char* names[] = {"rho", "theta", "phi"};
  return (component >= 0 && component < kComponentCount) ? names[component] : "?";
}

JointLayout::JointLayout(LayoutSpec spec) : spec_(std::move(spec)) {
  const std::string& id = spec_.id;
  const std::size_t n = spec_.joint_names.size();
  if (n < 2) invalid(id, "needs at least two joints");
  if (spec_.kinematic_parent.size() != n) invalid(id, "kinematic_parent has wrong length");
  if (spec_.markov_parent.size() != n) invalid(id, "markov_parent has wrong length");
  if (spec_.bone_lengths.size() != n - 1) invalid(id, "bone_lengths must have J-1 entries");
  if (spec_.range_limits.size() != n) invalid(id, "range_limits must have J entries");
  kinematic_order_ = tree_order(spec_.kinematic_parent);
  if (kinematic_order_.empty()) invalid(id, "kinematic_parent is not a tree rooted at joint 0");
  markov_order_ = tree_order(spec_.markov_parent);
  if (markov_order_.empty()) invalid(id, "markov_parent is not a tree rooted at joint 0");
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(spec_.bone_lengths[j] > 0.0) || !std::isfinite(spec_.bone_lengths[j]))
      invalid(id, "bone length of joint " + std::to_string(j + 1) + " must be positive");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const RangeLimits& r = spec_.range_limits[j];
    for (int c = 0; c < kComponentCount; ++c) {
      if (!(r[c].lo <= r[c].hi)) invalid(id, "empty range for joint " + std::to_string(j));
    }
    if (r[0].lo < 0.0) invalid(id, "rho range below 0 at joint " + std::to_string(j));
    if (r[1].lo < 0.0 || r[1].hi > kPi) invalid(id, "theta range outside [0,pi] at joint " + std::to_string(j));
    if (r[2].lo < -kPi || r[2].hi > kPi)
      invalid(id, "phi range outside [-pi,pi] at joint " + std::to_string(j));
  }
  const int a = spec_.root_anchor;
  if (a <= 0 || a >= static_cast<int>(n) || spec_.kinematic_parent[a] != 0)
    invalid(id, "root_anchor must be a child of the root");
  const HeadTriangleSpec& h = spec_.head;
  const int jn = static_cast<int>(n);
  if (h.a < 0 || h.a >= jn || h.b < 0 || h.b >= jn || h.c < 0 || h.c >= jn || h.a == h.b ||
      h.b == h.c || h.a == h.c)
    invalid(id, "head triangle joints must be three distinct joints");
  if (!(h.alpha > 0.0) || !(h.beta > 0.0) || !(h.ab_length > 0.0))
    invalid(id, "head triangle ratios and AB length must be positive");
  if (!(1.0 + h.alpha > h.beta && 1.0 + h.beta > h.alpha && h.alpha + h.beta > 1.0))
    invalid(id, "head triangle ratios violate the triangle inequality");
  hash_ = fnv1a64(serialize_layout(spec_));
}

LocalFrame root_frame() { return LocalFrame{{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}; }

LocalFrame local_frame(const Vec3& parent_pos, const Vec3& grandparent_pos,
                       const Vec3& reference_up) {
  const Vec3 d = parent_pos - grandparent_pos;
  const double len = norm(d);
  if (!(len >= kMinBone)) throw DegenerateFrame(-1, "parent and grandparent coincide");
  const Vec3 z = (1.0 / len) * d;
  const double ref_len = norm(reference_up);
  if (!(ref_len > 0.0)) throw DegenerateFrame(-1, "zero reference axis");
  const Vec3 u = (1.0 / ref_len) * reference_up;
  const Vec3 perp = u - dot(u, z) * z;
  // |perp| = sin(angle between reference and bone)
  if (norm(perp) < std::sin(kParallelAngle))
    throw DegenerateFrame(-1, "reference axis parallel to bone");
  const Vec3 x = normalized(perp);
  return LocalFrame{x, cross(z, x), z};
}

Vec3 spherical_direction(const LocalFrame& f, double theta, double phi) {
  const double st = std::sin(theta);
  return (st * std::cos(phi)) * f.x + (st * std::sin(phi)) * f.y + std::cos(theta) * f.z;
}

SphericalParams cart_to_spherical(const Pose3D& pose, const JointLayout& layout) {
  const int n = layout.joint_count();
  if (static_cast<int>(pose.size()) != n)
    throw Error(ErrorCode::kShapeMismatch, "pose has " + std::to_string(pose.size()) +
                                               " joints, layout expects " + std::to_string(n));
  SphericalParams out;
  out.joints.resize(n);
  std::vector<LocalFrame> frames(n);
  frames[0] = root_frame();
  for (int c : layout.kinematic_order()) {
    if (c == 0) continue;
    const int p = layout.kinematic_parent(c);
    const Vec3 v = pose.joints[c] - pose.joints[p];
    const double rho = norm(v);
    if (!(rho >= kMinBone)) throw DegenerateFrame(c, "joint " + std::to_string(c) + " coincides with its parent");
    const LocalFrame& f = frames[p];
    const double lx = dot(v, f.x), ly = dot(v, f.y), lz = dot(v, f.z);
    out.joints[c].values = {rho, std::atan2(std::hypot(lx, ly), lz), std::atan2(ly, lx)};
    frames[c] = child_frame(pose.joints[c], pose.joints[p], f, c);
  }
  out.joints[0] = out.joints[layout.root_anchor()];
  return out;
}

Pose3D spherical_to_cart(const SphericalParams& params, const JointLayout& layout) {
  const int n = layout.joint_count();
  if (static_cast<int>(params.joints.size()) != n)
    throw Error(ErrorCode::kShapeMismatch, "spherical params have wrong joint count");
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < kComponentCount; ++c) {
      const double v = params.joints[j][c];
      if (!layout.limits(j)[c].contains(v)) {
        std::ostringstream msg;
        msg << component_name(c) << " of joint " << j << " = " << v << " outside ["
            << layout.limits(j)[c].lo << ", " << layout.limits(j)[c].hi << "]";
        throw RangeViolation(j, c, msg.str());
      }
    }
  }
  Pose3D pose;
  pose.joints.assign(n, Vec3{0, 0, 0});
  std::vector<LocalFrame> frames(n);
  frames[0] = root_frame();
  for (int c : layout.kinematic_order()) {
    if (c == 0) continue;
    const int p = layout.kinematic_parent(c);
    const Spherical& s = params.joints[c];
    pose.joints[c] = pose.joints[p] + s.rho() * spherical_direction(frames[p], s.theta(), s.phi());
    frames[c] = child_frame(pose.joints[c], pose.joints[p], frames[p], c);
  }
  return pose;
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * kPi;
  a = std::fmod(a + kPi, two_pi);
  if (a < 0) a += two_pi;
  return a - kPi;
}

double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace synthpose
