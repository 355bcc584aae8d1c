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

#include "synthpose/reference_model.hpp"

#include <algorithm>
#include <cmath>

#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 unit(const Vec3& v) { return (1.0 / norm(v)) * v; }

// Joint indices of the 17-joint layout.
enum H36m {
  kPelvis, kRHip, kRKnee, kRAnkle, kLHip, kLKnee, kLAnkle, kSpine, kThorax,
  kNose, kHeadTop, kLShoulder, kLElbow, kLWrist, kRShoulder, kRElbow, kRWrist,
};

}  // namespace

double head_apex_theta(const HeadTriangleSpec& h) {
  const double cos_b = (1.0 + h.alpha * h.alpha - h.beta * h.beta) / (2.0 * h.alpha);
  return kPi - std::acos(std::clamp(cos_b, -1.0, 1.0));
}

ReferenceModel::ReferenceModel(const JointLayout& layout, ReferenceOptions options)
    : layout_(layout), options_(options), h36m_(layout.id() == "h36m17") {
  const HeadTriangleSpec& h = layout.head();
  if (layout.kinematic_parent(h.a) != h.b || layout.kinematic_parent(h.b) != h.c)
    throw Error(ErrorCode::kInvalidLayout, "reference model needs the head triangle along one chain");
}

Pose3D ReferenceModel::canonical(Rng& rng) const {
  const int n = layout_.joint_count();
  Pose3D pose;
  pose.joints.assign(n, Vec3{0, 0, 0});
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  if (!h36m_) {
    // Generic body: every bone takes a random direction; the noise stage
    // and explicit limits do the rest.
    for (int c : layout_.kinematic_order()) {
      if (c == 0) continue;
      Vec3 d{n01(rng), n01(rng), n01(rng)};
      if (norm(d) < 1e-6) d = {0, 1, 0};
      pose.joints[c] = pose.joints[layout_.kinematic_parent(c)] + layout_.bone_length(c) * unit(d);
    }
    return pose;
  }

  // World directions of every bone for one activity, body facing +z.
  std::array<Vec3, 17> dir{};
  const Vec3 down{0, -1, 0}, up{0, 1, 0}, left{1, 0, 0}, right{-1, 0, 0}, fwd{0, 0, 1};
  auto mix = [](const Vec3& a, double wa, const Vec3& b, double wb) { return unit(wa * a + wb * b); };
  dir[kRHip] = right;
  dir[kLHip] = left;
  dir[kSpine] = up;
  dir[kThorax] = up;
  dir[kNose] = mix(up, 1.0, fwd, 0.25);
  dir[kLShoulder] = left;
  dir[kRShoulder] = right;
  dir[kLElbow] = down;
  dir[kRElbow] = down;
  dir[kLWrist] = down;
  dir[kRWrist] = down;
  dir[kRKnee] = down;
  dir[kLKnee] = down;
  dir[kRAnkle] = down;
  dir[kLAnkle] = down;

  const double pick = u01(rng);
  if (pick < 0.25) {
    // standing: arms a little away from the body
    const double a = 0.2 + 0.3 * u01(rng);
    dir[kLElbow] = mix(down, std::cos(a), left, std::sin(a));
    dir[kRElbow] = mix(down, std::cos(a), right, std::sin(a));
  } else if (pick < 0.5) {
    // walking: legs and arms swing in opposition
    const double s = 0.6 * (2.0 * u01(rng) - 1.0);
    dir[kLKnee] = mix(down, std::cos(s), fwd, std::sin(s));
    dir[kRKnee] = mix(down, std::cos(s), fwd, -std::sin(s));
    dir[kLAnkle] = mix(down, std::cos(s), fwd, std::sin(s) - 0.3 * std::abs(s));
    dir[kRAnkle] = mix(down, std::cos(s), fwd, -std::sin(s) - 0.3 * std::abs(s));
    dir[kLElbow] = mix(down, std::cos(s), fwd, -0.6 * std::sin(s));
    dir[kRElbow] = mix(down, std::cos(s), fwd, 0.6 * std::sin(s));
    dir[kLWrist] = mix(down, 1.0, fwd, 0.3 - 0.5 * std::sin(s));
    dir[kRWrist] = mix(down, 1.0, fwd, 0.3 + 0.5 * std::sin(s));
  } else if (pick < 0.7) {
    // sitting: thighs forward, shins down, forearms on the lap
    const double spread = 0.15 * u01(rng);
    dir[kLKnee] = mix(fwd, 1.0, left, spread);
    dir[kRKnee] = mix(fwd, 1.0, right, spread);
    dir[kLWrist] = fwd;
    dir[kRWrist] = fwd;
  } else if (pick < 0.85) {
    // reaching: one or both arms raised
    const double a = 0.5 + 2.0 * u01(rng);
    dir[kLElbow] = mix(down, std::cos(a), fwd, std::sin(a));
    dir[kLWrist] = mix(down, std::cos(a + 0.3), fwd, std::sin(a + 0.3));
    if (u01(rng) < 0.5) {
      const double b = 0.5 + 2.0 * u01(rng);
      dir[kRElbow] = mix(down, std::cos(b), fwd, std::sin(b));
      dir[kRWrist] = mix(down, std::cos(b + 0.3), fwd, std::sin(b + 0.3));
    }
  } else {
    // bending forward at the waist
    const double a = 0.4 + 0.8 * u01(rng);
    dir[kSpine] = mix(up, std::cos(a), fwd, std::sin(a));
    dir[kThorax] = mix(up, std::cos(a * 1.1), fwd, std::sin(a * 1.1));
    dir[kNose] = mix(up, std::cos(a * 1.2), fwd, std::sin(a * 1.2) + 0.25);
    dir[kLElbow] = mix(down, 1.0, fwd, 0.2);
    dir[kRElbow] = mix(down, 1.0, fwd, 0.2);
  }
  // Head top: filled in later from the head triangle.
  dir[kHeadTop] = dir[kNose];

  const double yaw = options_.yaw_range * (2.0 * u01(rng) - 1.0);
  const Mat3 r = rotation_y(yaw);
  for (int c : layout_.kinematic_order()) {
    if (c == 0) continue;
    pose.joints[c] = pose.joints[layout_.kinematic_parent(c)] + layout_.bone_length(c) * (r * dir[c]);
  }
  return pose;
}

SphericalParams ReferenceModel::sample_params(Rng& rng) const {
  std::normal_distribution<double> n01(0.0, 1.0);
  SphericalParams s = cart_to_spherical(canonical(rng), layout_);
  const HeadTriangleSpec& head = layout_.head();
  const double apex = head_apex_theta(head);
  for (int c = 1; c < layout_.joint_count(); ++c) {
    const RangeLimits& lim = layout_.limits(c);
    s.joints[c][0] = std::clamp(layout_.bone_length(c), lim[0].lo, lim[0].hi);
    double theta = s.joints[c][1] + options_.angle_noise * n01(rng);
    // Reflect through the poles instead of clamping onto them.
    if (theta < 0.0) theta = -theta;
    if (theta > kPi) theta = 2.0 * kPi - theta;
    s.joints[c][1] = std::clamp(theta, std::max(lim[1].lo, 1e-3), std::min(lim[1].hi, kPi - 1e-3));
    s.joints[c][2] = std::clamp(wrap_angle(s.joints[c][2] + options_.angle_noise * n01(rng)), lim[2].lo, lim[2].hi);
  }
  s.joints[head.a][1] = apex;
  s.joints[0] = s.joints[layout_.root_anchor()];
  return s;
}

Pose3D ReferenceModel::sample(Rng& rng) const { return spherical_to_cart(sample_params(rng), layout_); }

std::vector<Pose3D> ReferenceModel::sample(std::size_t count, Rng& rng) const {
  std::vector<Pose3D> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

}  // namespace synthpose
