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

#include "synthpose/seedlift.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

constexpr double kTol = 1e-9;

struct Candidate {
  double u = 0.0;  // scaled: 1 / lambda^2 * m^2
  double d_b = 0.0, d_c = 0.0;
  bool same_side = true;
};

}  // namespace

ScaleSolution solve_scale(double ab_px, double ac_px, double bc_px, const HeadTriangleSpec& spec) {
  if (!(ab_px >= 0.0 && ac_px >= 0.0 && bc_px >= 0.0) || !std::isfinite(ab_px) || !std::isfinite(ac_px) ||
      !std::isfinite(bc_px))
    throw NoRealSolution("head triangle distances must be finite and non-negative", INFINITY);
  const double m = std::max({ab_px, ac_px, bc_px});
  if (!(m > 0.0)) {
    // Every depth relation must then hold on its own: d_b = 1, d_c = beta,
    // |d_b -+ d_c| = alpha, which a proper triangle never satisfies.
    const double be = spec.beta, al2 = spec.alpha * spec.alpha;
    const double r = std::min(std::abs((1.0 - be) * (1.0 - be) - al2), std::abs((1.0 + be) * (1.0 + be) - al2));
    throw NoRealSolution("head triangle collapses to a point", r / (1.0 + be * be));
  }
  const double ab = ab_px / m, ac = ac_px / m, bc = bc_px / m;
  // A planar triangle seen under scaled orthography can take any 2D shape,
  // so the only hard obstruction is a non-triangle in the image.
  const double slack = std::min({ab + ac - bc, ab + bc - ac, ac + bc - ab});
  if (slack < -kTol) {
    std::ostringstream msg;
    msg << "head keypoints violate the triangle inequality (ab=" << ab_px << ", ac=" << ac_px
        << ", bc=" << bc_px << ")";
    throw NoRealSolution(msg.str(), -slack);
  }

  const double al2 = spec.alpha * spec.alpha, be2 = spec.beta * spec.beta;
  const double a = ab * ab, b = ac * ac, c = bc * bc;
  const double k0 = 1.0 + be2 - al2;
  const double s = a + b - c;
  const double qa = 4.0 * a * b - s * s;
  const double qb = -4.0 * (b + a * be2) + 2.0 * k0 * s;
  const double qc = 4.0 * be2 - k0 * k0;

  std::vector<double> roots;
  const double scale = std::abs(qb) + std::abs(qc);
  if (std::abs(qa) <= 1e-14 * std::max(scale, 1e-300)) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    double disc = qb * qb - 4.0 * qa * qc;
    // A fronto-parallel head sits exactly on the double root; below rounding
    // level the two roots are indistinguishable, so take the double root.
    const double mag = qb * qb + std::abs(4.0 * qa * qc);
    if (std::abs(disc) <= 64.0 * std::numeric_limits<double>::epsilon() * mag ||
        (disc < 0.0 && disc >= -1e-10 * mag))
      disc = 0.0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      if (q != 0.0) {
        roots.push_back(q / qa);
        roots.push_back(qc / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }

  std::vector<Candidate> valid;
  double best_violation = INFINITY;
  for (double u : roots) {
    const double r_b = 1.0 - a * u;
    const double r_c = be2 - b * u;
    const double r_bc = al2 - c * u;
    const double violation = std::max({-u, -r_b, -r_c, -r_bc, 0.0});
    best_violation = std::min(best_violation, violation);
    if (!(u > 0.0) || violation > kTol) continue;
    Candidate cand;
    cand.u = u;
    cand.d_b = std::sqrt(std::max(0.0, r_b));
    cand.d_c = std::sqrt(std::max(0.0, r_c));
    cand.same_side = (k0 - s * u) >= 0.0;
    const double diff = cand.same_side ? cand.d_b - cand.d_c : cand.d_b + cand.d_c;
    if (std::abs(diff * diff - std::max(0.0, r_bc)) > 1e-7 * (1.0 + be2)) continue;
    valid.push_back(cand);
  }
  if (valid.empty()) {
    std::ostringstream msg;
    msg << "no scale reproduces the head triangle (ab=" << ab_px << ", ac=" << ac_px << ", bc=" << bc_px << ")";
    throw NoRealSolution(msg.str(), best_violation);
  }
  // Larger lambda, i.e. smaller u, when both roots are admissible.
  std::sort(valid.begin(), valid.end(), [](const Candidate& x, const Candidate& y) { return x.u < y.u; });
  ScaleSolution out;
  out.lambda = m / std::sqrt(valid[0].u);
  out.d_b = valid[0].d_b;
  out.d_c = valid[0].d_c;
  out.same_side = valid[0].same_side;
  if (valid.size() > 1 && valid[1].u - valid[0].u > 1e-12 * valid[1].u) {
    out.both_roots_valid = true;
    out.other_lambda = m / std::sqrt(valid[1].u);
  }
  return out;
}

LiftResult lift(const AnnotatedPose2D& pose, const JointLayout& layout) { return lift(pose, layout, layout.head()); }

LiftResult lift(const AnnotatedPose2D& pose, const JointLayout& layout, const HeadTriangleSpec& spec) {
  const int n = layout.joint_count();
  if (static_cast<int>(pose.keypoints_px.size()) != n)
    throw Error(ErrorCode::kShapeMismatch, "lift: expected " + std::to_string(n) + " keypoints, got " +
                                               std::to_string(pose.keypoints_px.size()));
  if (static_cast<int>(pose.signs.size()) != n && static_cast<int>(pose.signs.size()) != n - 1)
    throw Error(ErrorCode::kShapeMismatch, "lift: expected one sign per joint");
  // A J-1 sign vector omits the root.
  const int offset = static_cast<int>(pose.signs.size()) == n ? 0 : 1;
  auto sign_of = [&](int j) { return pose.signs[j - offset]; };
  for (int j = 1; j < n; ++j)
    if (sign_of(j) != 1 && sign_of(j) != -1) throw MissingSign(j);
  for (const Vec2& p : pose.keypoints_px)
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      throw Error(ErrorCode::kFormat, "lift: non-finite keypoint");
  if (!(spec.ab_length > 0.0)) throw Error(ErrorCode::kInvalidLayout, "lift: head triangle has no AB length");

  auto dist = [&](int i, int j) {
    const Vec2& p = pose.keypoints_px[i];
    const Vec2& q = pose.keypoints_px[j];
    return std::hypot(p[0] - q[0], p[1] - q[1]);
  };
  LiftResult out;
  out.scale = solve_scale(dist(spec.a, spec.b), dist(spec.a, spec.c), dist(spec.b, spec.c), spec);
  out.lambda_prop = out.scale.lambda;
  out.pixels_per_metre = out.scale.lambda / spec.ab_length;
  const double k = out.pixels_per_metre;

  const Vec2 root = pose.keypoints_px[0];
  out.pose.joints.assign(n, Vec3{0.0, 0.0, 0.0});
  out.clamped.assign(n, false);
  for (int j = 0; j < n; ++j) {
    const Vec2& p = pose.keypoints_px[j];
    out.pose.joints[j][0] = (p[0] - root[0]) / k;
    out.pose.joints[j][1] = -(p[1] - root[1]) / k;  // image y points down
  }
  for (int j : layout.kinematic_order()) {
    if (j == 0) continue;
    const int p = layout.kinematic_parent(j);
    const double r = dist(j, p) / k;
    const double l = layout.bone_length(j);
    if (r > l) out.clamped[j] = true;
    const double dz = std::sqrt(std::max(0.0, l * l - r * r));
    out.pose.joints[j][2] = out.pose.joints[p][2] + sign_of(j) * dz;
  }
  return out;
}

double total_variance(std::span<const Pose2D> dataset, std::span<const std::size_t> indices) {
  if (indices.empty()) return 0.0;
  std::vector<std::vector<double>> rows;
  rows.reserve(indices.size());
  for (std::size_t i : indices) rows.push_back(flatten(normalize_2d(dataset[i])));
  const std::size_t dim = rows[0].size();
  const double inv = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[d];
    mean *= inv;
    double var = 0.0;
    for (const auto& r : rows) var += (r[d] - mean) * (r[d] - mean);
    total += var * inv;
  }
  return total;
}

std::vector<SeedSet> select_seed_sets(std::span<const Pose2D> dataset, const SeedSelectionOptions& options,
                                      Rng& rng) {
  if (options.set_size == 0) throw Error(ErrorCode::kConfig, "select_seed_sets: set_size must be positive");
  if (dataset.size() < options.set_size) {
    std::ostringstream msg;
    msg << "dataset has " << dataset.size() << " poses, a seed set needs " << options.set_size;
    throw Error(ErrorCode::kDatasetTooSmall, msg.str());
  }
  // Normalise once; total_variance() on the raw poses gives the same numbers.
  std::vector<std::vector<double>> flat;
  flat.reserve(dataset.size());
  for (const Pose2D& p : dataset) flat.push_back(flatten(normalize_2d(p)));
  const std::size_t dim = flat[0].size();
  for (const auto& f : flat)
    if (f.size() != dim) throw Error(ErrorCode::kShapeMismatch, "select_seed_sets: joint count differs");

  std::vector<std::size_t> pool(dataset.size());
  std::set<std::vector<std::size_t>> seen;
  std::vector<SeedSet> sets;
  std::vector<double> mean(dim);
  for (std::size_t cand = 0; cand < options.candidates; ++cand) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < options.set_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<std::size_t> idx(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(options.set_size));
    std::sort(idx.begin(), idx.end());
    if (!seen.insert(idx).second) continue;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t i : idx)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += flat[i][d];
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (double& v : mean) v *= inv;
    double total = 0.0;
    for (std::size_t i : idx)
      for (std::size_t d = 0; d < dim; ++d) total += (flat[i][d] - mean[d]) * (flat[i][d] - mean[d]);
    sets.push_back(SeedSet{std::move(idx), total * inv});
  }
  std::stable_sort(sets.begin(), sets.end(),
                   [](const SeedSet& x, const SeedSet& y) { return x.total_variance > y.total_variance; });
  if (sets.size() > options.keep) sets.resize(options.keep);
  return sets;
}

}  // namespace synthpose
