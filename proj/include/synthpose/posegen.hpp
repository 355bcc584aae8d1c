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

// Non-parametric pose distribution over a Markov tree of joints.
//
// Each of the three spherical components of a joint depends only on the
// same component of its Markov parent, so the distribution is a set of
// 50x50 conditional histograms (one per joint and component) plus three
// 1-D marginals for the root triple.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "synthpose/histogram.hpp"
#include "synthpose/random.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

class DistributionSet {
 public:
  explicit DistributionSet(JointLayout layout);

  const JointLayout& layout() const { return layout_; }
  // Joint 0 addresses the root marginals.
  Histogram& histogram(int joint, int component) { return hists_[joint][component]; }
  const Histogram& histogram(int joint, int component) const { return hists_[joint][component]; }
  int conditional_count() const { return 3 * (layout_.joint_count() - 1); }

  long step() const { return step_; }
  void set_step(long t) { step_ = t; }

 private:
  JointLayout layout_;
  std::vector<std::array<Histogram, kComponentCount>> hists_;
  long step_ = 0;
};

// Draw counts mirroring every histogram of a DistributionSet.
class EmpiricalTracker {
 public:
  explicit EmpiricalTracker(const DistributionSet& dist);

  std::span<const std::uint64_t> row_counts(int joint, int component, int row) const;
  std::uint64_t row_total(int joint, int component, int row) const;
  void record(int joint, int component, int row, int bin);

 private:
  struct Grid {
    int cols = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> totals;
  };
  std::vector<std::array<Grid, kComponentCount>> grids_;
};

// Weight of seed i = share of real poses whose nearest seed (Euclidean, on
// normalised 2D poses) is i; ties go to the lower index.
std::vector<double> seed_weights(std::span<const Pose2D> real_2d, std::span<const Pose2D> seeds_2d);

// Each seed adds its weight to every (parent bin, child bin) it hits; rows
// are then normalised. Throws RangeViolation for out-of-limit seed values.
DistributionSet init_from_seeds(std::span<const SphericalParams> seeds,
                                std::span<const double> weights, const JointLayout& layout);

// One diffusion step on every histogram: explicit 5-point Laplacian with
// zero-flux edges (periodic along full-circle phi axes), masked bins forced
// to zero, non-empty rows renormalised. `alpha_per_joint[j]` applies to the
// three histograms of joint j (j = 0: root marginals). Throws
// Error(kUnstableCoefficient) unless 0 <= alpha < 0.25.
void diffuse(DistributionSet& dist, std::span<const double> alpha_per_joint);
void diffuse(DistributionSet& dist, double alpha);

struct DiffusionSchedule {
  double base = 1e-5;
  int views = 4;
  std::vector<double> last_loss;  // per joint; empty before the first batch
};

inline constexpr double kMaxDiffusionCoefficient = 0.249;

// alpha_j = base * 10^(|now_j - prev_j| / (10 N)), clamped to 0.249.
std::vector<double> diffusion_alpha(const DiffusionSchedule& schedule,
                                    std::span<const double> joint_loss_now,
                                    std::span<const double> joint_loss_prev, int views);

// Convenience for the training loop: uses and then updates schedule.last_loss
// (returns `base` everywhere on the first call).
std::vector<double> next_diffusion_alpha(DiffusionSchedule& schedule,
                                         std::span<const double> joint_loss_now);

struct BinSample {
  int bin = 0;
  double value = 0.0;
};

// Uniform choice among bins with P_t > 0 whose empirical frequency
// count/total does not exceed P_t; all P_t > 0 bins when none qualifies.
// The value is uniform within the admissible part of the bin. Throws
// EmptyRow when the row has no mass.
BinSample sample_bin(std::span<const double> row_true, std::span<const std::uint64_t> row_counts,
                     std::uint64_t total, const BinAxis& axis, Rng& rng);

struct GeneratedPose {
  Pose3D pose;
  SphericalParams params;
};

// Root triple from the marginals, then every joint in Markov order,
// conditioned on its parent's bin; updates the tracker. A conditional row
// without mass (reachable only after uneven diffusion) falls back to the
// nearest row that has mass.
GeneratedPose generate(const DistributionSet& dist, EmpiricalTracker& tracker, Rng& rng);

}  // namespace synthpose
