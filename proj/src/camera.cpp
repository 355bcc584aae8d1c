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

#include "synthpose/camera.hpp"

#include <algorithm>
#include <cmath>

#include "synthpose/error.hpp"

namespace synthpose {

Mat3 rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}

Mat3 rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}

Mat3 rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

Rotation sample_rotation(double sigma_azimuth, double sigma_tilt, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double yaw = sigma_azimuth * n01(rng);
  const double pitch = sigma_tilt * n01(rng);
  const double roll = sigma_tilt * n01(rng);
  return Rotation{rotation_y(yaw) * rotation_x(pitch) * rotation_z(roll)};
}

YawPitchRoll extract_yaw_pitch_roll(const Mat3& r) {
  // Ry(a) Rx(b) Rz(c): r[1][2] = -sin b, r[0][2] = sin a cos b, r[2][2] = cos a cos b,
  // r[1][0] = cos b sin c, r[1][1] = cos b cos c.
  return {std::atan2(r[0][2], r[2][2]), std::asin(std::clamp(-r[1][2], -1.0, 1.0)),
          std::atan2(r[1][0], r[1][1])};
}

Pose3D rotate(const Mat3& r, const Pose3D& pose) {
  Pose3D out;
  out.joints.reserve(pose.size());
  for (const Vec3& p : pose.joints) out.joints.push_back(r * p);
  return out;
}

double frobenius_norm(const Pose3D& pose) {
  double s = 0.0;
  for (const Vec3& p : pose.joints) s += dot(p, p);
  return std::sqrt(s);
}

double frobenius_norm(const Pose2D& pose) {
  double s = 0.0;
  for (const Vec2& p : pose.joints) s += p[0] * p[0] + p[1] * p[1];
  return std::sqrt(s);
}

Pose2D project(const Pose3D& pose) {
  double s = 0.0;
  for (const Vec3& p : pose.joints) s += p[0] * p[0] + p[1] * p[1];
  const double n = std::sqrt(s);
  if (!(n > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "pose projects to a single point");
  Pose2D out;
  out.joints.reserve(pose.size());
  for (const Vec3& p : pose.joints) out.joints.push_back({p[0] / n, p[1] / n});
  return out;
}

Pose2D normalize_2d(const Pose2D& pose) {
  if (pose.joints.empty()) throw Error(ErrorCode::kDegeneratePose, "empty 2D pose");
  const Vec2 root = pose.joints[0];
  Pose2D out;
  out.joints.reserve(pose.size());
  double s = 0.0;
  for (const Vec2& p : pose.joints) {
    const Vec2 q{p[0] - root[0], p[1] - root[1]};
    s += q[0] * q[0] + q[1] * q[1];
    out.joints.push_back(q);
  }
  const double n = std::sqrt(s);
  if (!(n > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "2D pose collapses to a point");
  for (Vec2& q : out.joints) q = {q[0] / n, q[1] / n};
  return out;
}

std::vector<double> flatten(const Pose2D& pose) {
  std::vector<double> out;
  out.reserve(pose.size() * 2);
  for (const Vec2& p : pose.joints) out.insert(out.end(), {p[0], p[1]});
  return out;
}

std::vector<double> flatten(const Pose3D& pose) {
  std::vector<double> out;
  out.reserve(pose.size() * 3);
  for (const Vec3& p : pose.joints) out.insert(out.end(), {p[0], p[1], p[2]});
  return out;
}

ViewSigma view_sigma(const ViewSchedule& s, long batch_index) {
  double harmonic = 0.0;
  for (long k = 1; k < batch_index; ++k) harmonic += 1.0 / (2.0 * static_cast<double>(k));
  return {s.sigma0_azimuth + s.growth_azimuth * harmonic, s.sigma0_tilt + s.growth_tilt * harmonic};
}

}  // namespace synthpose
