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

// 2D -> 3D lifting network: in-layer, three residual blocks, out-layer.
// Parameters live in one flat vector so the optimiser and the checkpoint
// code see a single buffer.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "synthpose/camera.hpp"
#include "synthpose/random.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

enum class Activation : int { kLeakyRelu = 0, kRelu = 1 };
inline constexpr double kLeakySlope = 0.01;
const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);  // throws Error(kConfig)

inline constexpr int kResidualBlocks = 3;

struct DenseLayer {
  std::size_t weight_offset;  // out x in, row-major
  std::size_t bias_offset;
  int in;
  int out;
};

class LifterParams {
 public:
  LifterParams() = default;
  // All-zero parameters.
  LifterParams(int joints, int width, Activation activation = Activation::kLeakyRelu);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static LifterParams initialize(int joints, int width, Rng& rng,
                                 Activation activation = Activation::kLeakyRelu);

  int joints() const { return joints_; }
  int width() const { return width_; }
  Activation activation() const { return activation_; }
  // 0 = in-layer, 1..6 = block layers (two per block), 7 = out-layer.
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  int joints_ = 0;
  int width_ = 0;
  Activation activation_ = Activation::kLeakyRelu;
  std::vector<DenseLayer> layers_;
  std::vector<double> values_;
};

// Intermediate values kept for backward().
struct ForwardCache {
  std::size_t rows = 0;
  std::vector<double> input;                 // rows x 2J
  std::vector<double> z0;                    // in-layer pre-activation
  std::vector<std::vector<double>> h;        // h[0] after in-layer, h[k+1] after block k
  std::vector<std::vector<double>> u, v, w;  // per block: W1 h + b1, act(u), W2 v + b2
  std::vector<double> out;                   // raw out-layer
};

// x: rows x 2J (normalised 2D poses). Returns rows x 3J root-centred joints.
std::vector<double> forward_batch(const LifterParams& params, std::span<const double> x, std::size_t rows,
                                  ForwardCache* cache = nullptr);
// Throws Error(kShapeMismatch) on a joint-count mismatch.
Pose3D forward(const LifterParams& params, const Pose2D& normalized_input);

// Mean over views of the l1 distance between Frobenius-normalised poses.
double loss3d(std::span<const Pose3D> predictions, std::span<const Pose3D> targets);
double loss3d(const Pose3D& prediction, const Pose3D& target);

// Cross-view reprojection: prediction i rotated into view j by R_j R_i^T,
// projected, compared with the normalised target of view j, averaged over
// all N^2 ordered pairs (i == j included).
double loss2d(std::span<const Pose3D> predictions, std::span<const Pose2D> targets,
              std::span<const Rotation> rotations);

inline double total_loss(double l2d, double l3d, double lambda3d) { return l2d + lambda3d * l3d; }

// batch poses x N views. Row s * views + i holds pose s seen by camera i.
struct MultiViewBatch {
  int batch = 0;
  int views = 0;
  int joints = 0;
  std::vector<double> inputs;     // rows x 2J, projected and normalised
  std::vector<double> targets3d;  // rows x 3J, rotated, root-centred
  std::vector<Mat3> rotations;    // one per view
  std::size_t rows() const { return std::size_t(batch) * views; }
};

// Poses must be root-centred.
MultiViewBatch make_batch(std::span<const Pose3D> poses, std::span<const Rotation> rotations);

struct LossBreakdown {
  double l2d = 0.0;
  double l3d = 0.0;
  double total = 0.0;
  std::vector<double> joint_l3d;  // per-joint share of l3d (sums to l3d)
};

// Batch-averaged losses.
LossBreakdown evaluate_loss(const LifterParams& params, const MultiViewBatch& batch, double lambda3d);

// Same losses plus the exact gradient of `total` w.r.t. every parameter
// (grads resized to params.size()). Throws Error(kNonFiniteGradient).
LossBreakdown backward(const LifterParams& params, const MultiViewBatch& batch, double lambda3d,
                       std::vector<double>& grads);

// Product of per-layer spectral norms (power iteration) times the norm of
// the root-centring map; an upper bound on the network's Lipschitz constant
// for 1-Lipschitz activations.
double lipschitz_bound(const LifterParams& params, int iterations = 200);

struct OptimizerState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

void adam_step(LifterParams& params, std::span<const double> grads, OptimizerState& state, double lr);
// Same update on a bare buffer.
void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state, double lr);

}  // namespace synthpose
