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

// Virtual cameras: rotations mostly about the vertical axis, and the
// scaleless orthographic projection (drop depth, divide by the Frobenius
// norm of the 2 x J result).

#include <vector>

#include "synthpose/random.hpp"
#include "synthpose/skeleton.hpp"
#include "synthpose/vec3.hpp"

namespace synthpose {

struct Rotation {
  Mat3 m = identity3();
};

Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_z(double angle);

// R = Ry(yaw) Rx(pitch) Rz(roll), yaw ~ N(0, sigma_azimuth^2),
// pitch/roll ~ N(0, sigma_tilt^2).
Rotation sample_rotation(double sigma_azimuth, double sigma_tilt, Rng& rng);

// Inverse of Ry(yaw) Rx(pitch) Rz(roll) for |pitch| < pi/2.
struct YawPitchRoll {
  double yaw, pitch, roll;
};
YawPitchRoll extract_yaw_pitch_roll(const Mat3& r);

Pose3D rotate(const Mat3& r, const Pose3D& pose);

// Throws Error(kDegeneratePose) when every joint projects to the origin.
Pose2D project(const Pose3D& pose);

// Root-centre then divide by the Frobenius norm; idempotent on outputs of
// project(). Used for pixel-space keypoints.
Pose2D normalize_2d(const Pose2D& pose);

// [x0, y0, x1, y1, ...]
std::vector<double> flatten(const Pose2D& pose);
std::vector<double> flatten(const Pose3D& pose);

double frobenius_norm(const Pose3D& pose);
double frobenius_norm(const Pose2D& pose);

struct ViewSchedule {
  int views = 4;
  double sigma0_azimuth = 0.05;
  double growth_azimuth = 0.2;
  double sigma0_tilt = 0.02;
  double growth_tilt = 0.02;
};

struct ViewSigma {
  double azimuth;
  double tilt;
};

// sigma(b) = sigma0 + growth * sum_{k=1}^{b-1} 1/(2k) for the b-th batch of
// an epoch (b >= 1); callers restart b at 1 on every epoch.
ViewSigma view_sigma(const ViewSchedule& schedule, long batch_index);

}  // namespace synthpose
