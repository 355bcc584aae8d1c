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

#include "synthpose/posegen.hpp"

#include <cmath>
#include <sstream>

#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"

namespace synthpose {

DistributionSet::DistributionSet(JointLayout layout) : layout_(std::move(layout)) {
  const int n = layout_.joint_count();
  hists_.resize(n);
  for (int c = 0; c < kComponentCount; ++c) hists_[0][c] = Histogram(make_axis(layout_, 0, c));
  for (int j = 1; j < n; ++j) {
    const int p = layout_.markov_parent(j);
    for (int c = 0; c < kComponentCount; ++c)
      hists_[j][c] = Histogram(make_axis(layout_, p, c), make_axis(layout_, j, c));
  }
}

EmpiricalTracker::EmpiricalTracker(const DistributionSet& dist) {
  const int n = dist.layout().joint_count();
  grids_.resize(n);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < kComponentCount; ++c) {
      const Histogram& h = dist.histogram(j, c);
      Grid& g = grids_[j][c];
      g.cols = h.cols();
      g.counts.assign(std::size_t(h.rows()) * h.cols(), 0);
      g.totals.assign(h.rows(), 0);
    }
  }
}

std::span<const std::uint64_t> EmpiricalTracker::row_counts(int joint, int component, int row) const {
  const Grid& g = grids_[joint][component];
  return {g.counts.data() + std::size_t(row) * g.cols, std::size_t(g.cols)};
}

std::uint64_t EmpiricalTracker::row_total(int joint, int component, int row) const {
  return grids_[joint][component].totals[row];
}

void EmpiricalTracker::record(int joint, int component, int row, int bin) {
  Grid& g = grids_[joint][component];
  ++g.counts[std::size_t(row) * g.cols + bin];
  ++g.totals[row];
}

std::vector<double> seed_weights(std::span<const Pose2D> real_2d, std::span<const Pose2D> seeds_2d) {
  if (real_2d.empty()) throw Error(ErrorCode::kEmptyInput, "seed_weights: no real poses");
  if (seeds_2d.empty()) throw Error(ErrorCode::kEmptyInput, "seed_weights: no seeds");
  const std::size_t dim = seeds_2d[0].size() * 2;
  std::vector<double> seeds;
  seeds.reserve(seeds_2d.size() * dim);
  for (const Pose2D& s : seeds_2d) {
    if (s.size() * 2 != dim) throw Error(ErrorCode::kShapeMismatch, "seed_weights: joint count differs");
    const auto f = flatten(normalize_2d(s));
    seeds.insert(seeds.end(), f.begin(), f.end());
  }
  const simd::Kernels& k = simd::active_kernels();
  std::vector<double> counts(seeds_2d.size(), 0.0);
  std::vector<double> d(seeds_2d.size());
  for (const Pose2D& r : real_2d) {
    if (r.size() * 2 != dim) throw Error(ErrorCode::kShapeMismatch, "seed_weights: joint count differs");
    const auto q = flatten(normalize_2d(r));
    k.sq_distances(q.data(), seeds.data(), seeds_2d.size(), dim, d.data());
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.size(); ++i)
      if (d[i] < d[best]) best = i;
    counts[best] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(real_2d.size());
  return counts;
}

DistributionSet init_from_seeds(std::span<const SphericalParams> seeds, std::span<const double> weights,
                                const JointLayout& layout) {
  if (seeds.empty()) throw Error(ErrorCode::kEmptyInput, "init_from_seeds: no seeds");
  if (weights.size() != seeds.size())
    throw Error(ErrorCode::kShapeMismatch, "init_from_seeds: one weight per seed required");
  DistributionSet dist(layout);
  const int n = layout.joint_count();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const SphericalParams& sp = seeds[s];
    if (static_cast<int>(sp.joints.size()) != n)
      throw Error(ErrorCode::kShapeMismatch, "init_from_seeds: seed has wrong joint count");
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < kComponentCount; ++c) {
        if (!layout.limits(j)[c].contains(sp.joints[j][c])) {
          std::ostringstream msg;
          msg << "seed " << s << ": " << component_name(c) << " of joint " << j << " = "
              << sp.joints[j][c] << " outside its limits";
          throw RangeViolation(j, c, msg.str());
        }
      }
    }
    for (int c = 0; c < kComponentCount; ++c) {
      Histogram& root = dist.histogram(0, c);
      root.at(0, root.child_axis().bin_of(sp.joints[0][c])) += weights[s];
    }
    for (int j = 1; j < n; ++j) {
      const int p = layout.markov_parent(j);
      for (int c = 0; c < kComponentCount; ++c) {
        Histogram& h = dist.histogram(j, c);
        h.at(h.parent_axis().bin_of(sp.joints[p][c]), h.child_axis().bin_of(sp.joints[j][c])) +=
            weights[s];
      }
    }
  }
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < kComponentCount; ++c) {
      dist.histogram(j, c).apply_mask();
      dist.histogram(j, c).normalize_rows();
    }
  dist.set_step(0);
  return dist;
}

void diffuse(DistributionSet& dist, std::span<const double> alpha_per_joint) {
  const int n = dist.layout().joint_count();
  if (static_cast<int>(alpha_per_joint.size()) != n)
    throw Error(ErrorCode::kShapeMismatch, "diffuse: one coefficient per joint required");
  for (int j = 0; j < n; ++j) {
    const double a = alpha_per_joint[j];
    if (!(a >= 0.0 && a < 0.25)) {
      std::ostringstream msg;
      msg << "diffusion coefficient " << a << " for joint " << j << " outside [0, 0.25)";
      throw Error(ErrorCode::kUnstableCoefficient, msg.str());
    }
  }
  const simd::Kernels& k = simd::active_kernels();
  for (int j = 0; j < n; ++j) {
    if (alpha_per_joint[j] == 0.0) continue;
    for (int c = 0; c < kComponentCount; ++c) {
      Histogram& h = dist.histogram(j, c);
      h.laplacian_step(alpha_per_joint[j], k);
      h.apply_mask();
      h.normalize_rows();
    }
  }
  dist.set_step(dist.step() + 1);
}

void diffuse(DistributionSet& dist, double alpha) {
  const std::vector<double> a(dist.layout().joint_count(), alpha);
  diffuse(dist, a);
}

std::vector<double> diffusion_alpha(const DiffusionSchedule& schedule,
                                    std::span<const double> joint_loss_now,
                                    std::span<const double> joint_loss_prev, int views) {
  if (joint_loss_now.size() != joint_loss_prev.size())
    throw Error(ErrorCode::kShapeMismatch, "diffusion_alpha: loss vectors differ in length");
  if (views < 1) throw Error(ErrorCode::kConfig, "diffusion_alpha: views must be >= 1");
  std::vector<double> out(joint_loss_now.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double delta = std::abs(joint_loss_now[j] - joint_loss_prev[j]);
    const double a = schedule.base * std::pow(10.0, delta / (10.0 * views));
    out[j] = std::isfinite(a) ? std::min(a, kMaxDiffusionCoefficient) : kMaxDiffusionCoefficient;
  }
  return out;
}

std::vector<double> next_diffusion_alpha(DiffusionSchedule& schedule,
                                         std::span<const double> joint_loss_now) {
  std::vector<double> out;
  if (schedule.last_loss.size() != joint_loss_now.size()) {
    out.assign(joint_loss_now.size(), std::min(schedule.base, kMaxDiffusionCoefficient));
  } else {
    out = diffusion_alpha(schedule, joint_loss_now, schedule.last_loss, schedule.views);
  }
  schedule.last_loss.assign(joint_loss_now.begin(), joint_loss_now.end());
  return out;
}

BinSample sample_bin(std::span<const double> row_true, std::span<const std::uint64_t> row_counts,
                     std::uint64_t total, const BinAxis& axis, Rng& rng) {
  const std::size_t n = row_true.size();
  std::array<int, kBins> candidates;
  std::array<int, kBins> support;
  if (n > candidates.size() || row_counts.size() != n)
    throw Error(ErrorCode::kShapeMismatch, "sample_bin: row length mismatch");
  int count = 0;
  int support_count = 0;
  const double denom = static_cast<double>(total > 0 ? total : 1);
  for (std::size_t b = 0; b < n; ++b) {
    if (!(row_true[b] > 0.0)) continue;
    support[support_count++] = static_cast<int>(b);
    if (static_cast<double>(row_counts[b]) / denom <= row_true[b]) candidates[count++] = static_cast<int>(b);
  }
  if (support_count == 0) throw EmptyRow(-1, -1, "histogram row has no mass");
  const int* pool = count > 0 ? candidates.data() : support.data();
  const int pool_size = count > 0 ? count : support_count;
  std::uniform_int_distribution<int> pick(0, pool_size - 1);
  BinSample out;
  out.bin = pool[pick(rng)];
  const Interval iv = axis.admissible(out.bin);
  if (iv.hi > iv.lo) {
    std::uniform_real_distribution<double> u(iv.lo, iv.hi);
    out.value = u(rng);
  } else {
    out.value = axis.limits.lo;
  }
  return out;
}

namespace {

// Row with mass closest to `row` (ties toward the lower index).
int nearest_populated_row(const Histogram& h, int row) {
  for (int d = 0; d < h.rows(); ++d) {
    if (row - d >= 0 && h.row_sum(row - d) > 0.0) return row - d;
    if (row + d < h.rows() && h.row_sum(row + d) > 0.0) return row + d;
  }
  return -1;
}

}  // namespace

GeneratedPose generate(const DistributionSet& dist, EmpiricalTracker& tracker, Rng& rng) {
  const JointLayout& layout = dist.layout();
  const int n = layout.joint_count();
  GeneratedPose out;
  out.params.joints.resize(n);
  std::vector<std::array<int, kComponentCount>> bins(n);
  for (int c = 0; c < kComponentCount; ++c) {
    const Histogram& h = dist.histogram(0, c);
    BinSample s;
    try {
      s = sample_bin(h.row(0), tracker.row_counts(0, c, 0), tracker.row_total(0, c, 0), h.child_axis(), rng);
    } catch (const EmptyRow&) {
      throw EmptyRow(0, c, std::string("root marginal for ") + component_name(c) + " is empty");
    }
    tracker.record(0, c, 0, s.bin);
    out.params.joints[0][c] = s.value;
    bins[0][c] = s.bin;
  }
  for (int j : layout.markov_order()) {
    if (j == 0) continue;
    const int p = layout.markov_parent(j);
    for (int c = 0; c < kComponentCount; ++c) {
      const Histogram& h = dist.histogram(j, c);
      int row = bins[p][c];
      if (!(h.row_sum(row) > 0.0)) row = nearest_populated_row(h, row);
      if (row < 0)
        throw EmptyRow(j, c, std::string("histogram of ") + component_name(c) + " for joint " +
                                 std::to_string(j) + " is empty");
      const BinSample s =
          sample_bin(h.row(row), tracker.row_counts(j, c, row), tracker.row_total(j, c, row), h.child_axis(), rng);
      tracker.record(j, c, row, s.bin);
      out.params.joints[j][c] = s.value;
      bins[j][c] = s.bin;
    }
  }
  out.pose = spherical_to_cart(out.params, layout);
  return out;
}

}  // namespace synthpose
