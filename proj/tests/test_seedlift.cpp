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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"
#include "synthpose/reference_model.hpp"
#include "synthpose/seedlift.hpp"
#include "test_util.hpp"

using namespace synthpose;
using synthpose::testutil::project_px;
using synthpose::testutil::Projected;

namespace {

HeadTriangleSpec unit_head_triangle() { return HeadTriangleSpec{0, 1, 2, 1.0, 5.0 / 3.0, 1.0}; }

// Largest relative residual of the three head-triangle relations.
double residual(const ScaleSolution& s, double ab, double ac, double bc, const HeadTriangleSpec& h) {
  const double u = 1.0 / (s.lambda * s.lambda);
  const double diff = s.same_side ? s.d_b - s.d_c : s.d_b + s.d_c;
  const double r1 = s.d_b * s.d_b - (1.0 - ab * ab * u);
  const double r2 = s.d_c * s.d_c - (h.beta * h.beta - ac * ac * u);
  const double r3 = diff * diff - (h.alpha * h.alpha - bc * bc * u);
  const double scale = 1.0 + h.beta * h.beta;
  return std::max({std::abs(r1), std::abs(r2), std::abs(r3)}) / scale;
}

double relative_mpjpe(const Pose3D& a, const Pose3D& b) {
  double err = 0, scale = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    err += norm(a.joints[j] - b.joints[j]);
    scale += norm(b.joints[j] - b.joints[0]);
  }
  return err / scale;
}

std::vector<bool> subtree(const JointLayout& l, int root) {
  std::vector<bool> in(l.joint_count(), false);
  in[root] = true;
  for (int j : l.kinematic_order())
    if (j != 0 && in[l.kinematic_parent(j)]) in[j] = true;
  return in;
}

}  // namespace

TEST(SolveScale, FrontoParallel) {
  const ScaleSolution s = solve_scale(100.0, 100.0 * 5.0 / 3.0, 100.0, unit_head_triangle());
  EXPECT_NEAR(s.lambda, 100.0, 1e-9);
  EXPECT_NEAR(s.d_b, 0.0, 1e-6);
  EXPECT_NEAR(s.d_c, 0.0, 1e-6);
}

TEST(SolveScale, ForwardProjectionOracle) {
  // A = origin, B and C placed with depths 0.6 and 1.0, |AB| = 1, |AC| = 5/3, |BC| = 1.
  const double lambda = 50.0;
  const Vec3 a{0, 0, 0};
  const Vec3 b{0.8, 0, 0.6};
  // C: |C| = 5/3 with depth 1 -> planar radius 4/3; |B - C| = 1 fixes its direction.
  const double r = 4.0 / 3.0;
  const double cx = (0.64 + r * r + 0.16 - 1.0) / (2 * 0.8);
  const Vec3 c{cx, std::sqrt(r * r - cx * cx), 1.0};
  ASSERT_NEAR(norm(c - a), 5.0 / 3.0, 1e-12);
  ASSERT_NEAR(norm(c - b), 1.0, 1e-12);
  auto planar = [&](const Vec3& p, const Vec3& q) { return lambda * std::hypot(p[0] - q[0], p[1] - q[1]); };
  const double ab = planar(a, b), ac = planar(a, c), bc = planar(b, c);
  EXPECT_NEAR(ab, 40.0, 1e-12);
  EXPECT_NEAR(ac, 200.0 / 3.0, 1e-12);
  EXPECT_NEAR(bc, 50.0 * std::sqrt(0.84), 1e-12);
  const ScaleSolution s = solve_scale(ab, ac, bc, unit_head_triangle());
  EXPECT_NEAR(s.lambda, 50.0, 1e-6);
  EXPECT_NEAR(s.d_b, 0.6, 1e-6);
  EXPECT_NEAR(s.d_c, 1.0, 1e-6);
  EXPECT_TRUE(s.same_side);
  EXPECT_LT(residual(s, ab, ac, bc, unit_head_triangle()), 1e-9);
}

TEST(SolveScale, InfeasibleTriangleMatchesGridOracle) {
  const double ab = 200.0, ac = 60.0, bc = 100.0;
  const HeadTriangleSpec h = unit_head_triangle();
  // Oracle: view the rigid triangle from every direction on a dense grid,
  // take the least-squares scale, and measure how far the projected side
  // lengths stay from the measured ones.
  const double cx = (1.0 + h.beta * h.beta - h.alpha * h.alpha) / 2.0;
  const Vec3 A{0, 0, 0}, B{1, 0, 0}, C{cx, std::sqrt(h.beta * h.beta - cx * cx), 0};
  const Vec3 edges[3] = {B - A, C - A, C - B};
  const double meas[3] = {ab, ac, bc};
  double best = INFINITY;
  const int n = 600;
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k < 2 * n; ++k) {
      const double th = testutil::kPi * i / n, ph = testutil::kPi * k / n;
      const Vec3 dir{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      double p[3], num = 0, den = 0;
      for (int e = 0; e < 3; ++e) {
        p[e] = norm(cross(edges[e], dir));
        num += p[e] * meas[e], den += p[e] * p[e];
      }
      const double lambda = num / den;
      double worst = 0;
      for (int e = 0; e < 3; ++e) worst = std::max(worst, std::abs(lambda * p[e] - meas[e]) / ab);
      best = std::min(best, worst);
    }
  EXPECT_GT(best, 1e-3);
  try {
    solve_scale(ab, ac, bc, h);
    FAIL() << "no throw";
  } catch (const NoRealSolution& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoRealSolution);
    EXPECT_GT(e.best_residual(), 0.0);
  }
}

TEST(SolveScale, ResidualsOnRandomTriangles) {
  Rng rng(1);
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159), depth(-0.99, 0.99);
  const HeadTriangleSpec h = unit_head_triangle();
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    // random rigid triangle under random rotation and scale
    const Mat3 r = rotation_y(ang(rng)) * rotation_x(ang(rng)) * rotation_z(ang(rng));
    const double angle_b = std::acos((1.0 + h.alpha * h.alpha - h.beta * h.beta) / (2 * h.alpha));
    const Vec3 a{0, 0, 0}, b{1, 0, 0};
    const Vec3 c{1 - h.alpha * std::cos(angle_b), h.alpha * std::sin(angle_b), 0};
    const Vec3 ra = r * a, rb = r * b, rc = r * c;
    const double lambda = 10.0 + 300.0 * std::abs(depth(rng));
    auto planar = [&](const Vec3& p, const Vec3& q) { return lambda * std::hypot(p[0] - q[0], p[1] - q[1]); };
    const double ab = planar(ra, rb), ac = planar(ra, rc), bc = planar(rb, rc);
    if (std::min({ab, ac, bc}) < 1e-3 * lambda) continue;
    const ScaleSolution s = solve_scale(ab, ac, bc, h);
    ASSERT_LT(residual(s, ab, ac, bc, h), 1e-9) << i;
    if (!s.both_roots_valid) {
      EXPECT_NEAR(s.lambda, lambda, 1e-6 * lambda);
    } else {
      EXPECT_TRUE(std::abs(s.lambda - lambda) < 1e-6 * lambda || std::abs(s.other_lambda - lambda) < 1e-6 * lambda);
      EXPECT_GT(s.lambda, s.other_lambda);
    }
    ++checked;
  }
  EXPECT_GT(checked, 4000);
}

TEST(SolveScale, BadInputs) {
  EXPECT_THROW(solve_scale(0, 0, 0, unit_head_triangle()), NoRealSolution);
  EXPECT_THROW(solve_scale(-1, 2, 2, unit_head_triangle()), NoRealSolution);
  EXPECT_THROW(solve_scale(NAN, 2, 2, unit_head_triangle()), NoRealSolution);
}

TEST(SolveScale, CollapsedTriangleResidual) {
  // Zero image distances leave d_b = 1, d_c = 5/3 and |d_b -+ d_c| = 1:
  // closest relation misses by (2/3)^2 - 1 = -5/9, scaled by 1 + 25/9.
  try {
    solve_scale(0, 0, 0, unit_head_triangle());
    FAIL() << "expected NoRealSolution";
  } catch (const NoRealSolution& e) {
    EXPECT_NEAR(e.best_residual(), 5.0 / 34.0, 1e-15);
  }
}

TEST(Lift, OrthographicRoundTrip) {
  const JointLayout& l = h36m17_layout();
  ReferenceModel model(l);
  Rng rng(2);
  std::uniform_real_distribution<double> lam(20.0, 200.0);
  for (int i = 0; i < 200; ++i) {
    const Pose3D x = model.sample(rng);
    const double lambda = lam(rng);
    const Projected p = project_px(x, l, lambda);
    const LiftResult r = lift(p.annotated, l);
    ASSERT_LT(relative_mpjpe(r.pose, x), 1e-6) << i;
    EXPECT_NEAR(r.pixels_per_metre, p.pixels_per_metre, 1e-6 * p.pixels_per_metre);
    EXPECT_NEAR(r.lambda_prop, r.scale.lambda, 0.0);
  }
}

TEST(Lift, SignVectorWithoutRoot) {
  const JointLayout& l = h36m17_layout();
  Rng rng(3);
  const Pose3D x = ReferenceModel(l).sample(rng);
  Projected p = project_px(x, l, 80.0);
  const LiftResult full = lift(p.annotated, l);
  p.annotated.signs.erase(p.annotated.signs.begin());
  const LiftResult short_signs = lift(p.annotated, l);
  for (int j = 0; j < l.joint_count(); ++j)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(full.pose.joints[j][c], short_signs.pose.joints[j][c]);
}

TEST(Lift, FrontoParallelGivesZeroDepth) {
  const JointLayout& l = h36m17_layout();
  Rng rng(4);
  Pose3D x = ReferenceModel(l).sample(rng);
  // Flatten onto the image plane and rescale bones back to their lengths.
  SphericalParams s = cart_to_spherical(x, l);
  Pose3D flat;
  flat.joints.assign(l.joint_count(), Vec3{0, 0, 0});
  for (int j : l.kinematic_order()) {
    if (j == 0) continue;
    Vec3 d = x.joints[j] - x.joints[l.kinematic_parent(j)];
    d[2] = 0;
    flat.joints[j] = flat.joints[l.kinematic_parent(j)] + (s.joints[j].rho() / norm(d)) * d;
  }
  // The head triangle must stay rigid: rebuild it in-plane.
  const HeadTriangleSpec& h = l.head();
  const Vec3 c = flat.joints[h.c];
  const Vec3 dir = (1.0 / norm(flat.joints[h.b] - c)) * (flat.joints[h.b] - c);
  flat.joints[h.b] = c + (h.alpha * h.ab_length) * dir;
  const double cos_b = (1.0 + h.alpha * h.alpha - h.beta * h.beta) / (2 * h.alpha);
  const double ang_b = std::acos(cos_b);
  // rotate -dir by the interior angle at B within the plane
  const Vec3 back = -1.0 * dir;
  const Vec3 rot{std::cos(ang_b) * back[0] - std::sin(ang_b) * back[1], std::sin(ang_b) * back[0] + std::cos(ang_b) * back[1], 0};
  flat.joints[h.a] = flat.joints[h.b] + h.ab_length * rot;
  LayoutSpec spec = l.spec();
  for (int j = 1; j < l.joint_count(); ++j) {
    spec.bone_lengths[j - 1] = norm(flat.joints[j] - flat.joints[l.kinematic_parent(j)]);
    spec.range_limits[j][0] = Interval{0.5 * spec.bone_lengths[j - 1], 2.0 * spec.bone_lengths[j - 1]};
  }
  const JointLayout flat_layout(spec);
  Projected p = project_px(flat, flat_layout, 120.0);
  for (int sgn : {1, -1}) {
    std::fill(p.annotated.signs.begin() + 1, p.annotated.signs.end(), sgn);
    const LiftResult r = lift(p.annotated, flat_layout);
    for (int j = 0; j < l.joint_count(); ++j) EXPECT_NEAR(r.pose.joints[j][2], 0.0, 1e-6);
  }
}

TEST(Lift, SignFlipChangesOnlySubtree) {
  const JointLayout& l = h36m17_layout();
  Rng rng(5);
  const Pose3D x = ReferenceModel(l).sample(rng);
  const Projected p = project_px(x, l, 90.0);
  const LiftResult base = lift(p.annotated, l);
  for (int j = 1; j < l.joint_count(); ++j) {
    AnnotatedPose2D flipped = p.annotated;
    flipped.signs[j] = -flipped.signs[j];
    const LiftResult r = lift(flipped, l);
    const auto in = subtree(l, j);
    const int par = l.kinematic_parent(j);
    for (int k = 0; k < l.joint_count(); ++k) {
      EXPECT_EQ(r.pose.joints[k][0], base.pose.joints[k][0]);
      EXPECT_EQ(r.pose.joints[k][1], base.pose.joints[k][1]);
      if (!in[k]) {
        EXPECT_EQ(r.pose.joints[k][2], base.pose.joints[k][2]) << "joint " << k << " outside subtree of " << j;
      } else if (k == j) {
        EXPECT_NEAR(r.pose.joints[k][2] - r.pose.joints[par][2], -(base.pose.joints[k][2] - base.pose.joints[par][2]), 1e-12);
      } else {
        EXPECT_NEAR(r.pose.joints[k][2] - r.pose.joints[j][2], base.pose.joints[k][2] - base.pose.joints[j][2], 1e-12);
      }
    }
  }
}

TEST(Lift, ClampFlagsExactlyWhenBoneTooLong) {
  const JointLayout& l = h36m17_layout();
  const HeadTriangleSpec& h = l.head();
  Rng rng(6);
  std::normal_distribution<double> noise(0.0, 15.0);
  int raised = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Pose3D x = ReferenceModel(l).sample(rng);
    Projected p = project_px(x, l, 100.0);
    for (int j = 0; j < l.joint_count(); ++j) {
      if (j == h.a || j == h.b || j == h.c) continue;
      p.annotated.keypoints_px[j][0] += noise(rng);
      p.annotated.keypoints_px[j][1] += noise(rng);
    }
    const LiftResult r = lift(p.annotated, l);
    EXPECT_FALSE(r.clamped[0]);
    for (int j = 1; j < l.joint_count(); ++j) {
      const Vec2& a = p.annotated.keypoints_px[j];
      const Vec2& b = p.annotated.keypoints_px[l.kinematic_parent(j)];
      const double bone2d = std::hypot(a[0] - b[0], a[1] - b[1]) / r.pixels_per_metre;
      ASSERT_EQ(bool(r.clamped[j]), bone2d > l.bone_length(j)) << "joint " << j;
      raised += r.clamped[j];
      if (r.clamped[j]) {
        EXPECT_EQ(r.pose.joints[j][2], r.pose.joints[l.kinematic_parent(j)][2]);
      }
    }
  }
  EXPECT_GT(raised, 0);
}

TEST(Lift, Errors) {
  const JointLayout& l = h36m17_layout();
  Rng rng(7);
  const Projected p = project_px(ReferenceModel(l).sample(rng), l, 100.0);
  AnnotatedPose2D missing = p.annotated;
  missing.signs[5] = 0;
  try {
    lift(missing, l);
    FAIL();
  } catch (const MissingSign& e) {
    EXPECT_EQ(e.joint(), 5);
  }
  AnnotatedPose2D shape = p.annotated;
  shape.keypoints_px.pop_back();
  EXPECT_THROW(lift(shape, l), Error);
  AnnotatedPose2D bad_head = p.annotated;
  // Head keypoints on one pixel.
  bad_head.keypoints_px[l.head().b] = bad_head.keypoints_px[l.head().c] = bad_head.keypoints_px[l.head().a];
  EXPECT_THROW(lift(bad_head, l), NoRealSolution);
}

TEST(TotalVariance, MatchesBruteForce) {
  Rng rng(8);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> data;
  for (int i = 0; i < 30; ++i) data.push_back(project(m.sample(rng)));
  const std::vector<std::size_t> idx{1, 4, 9, 16, 25};
  double expected = 0;
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 2; ++c) {
      double mean = 0;
      for (auto i : idx) mean += normalize_2d(data[i]).joints[j][c];
      mean /= idx.size();
      for (auto i : idx) {
        const double d = normalize_2d(data[i]).joints[j][c] - mean;
        expected += d * d / idx.size();
      }
    }
  EXPECT_NEAR(total_variance(data, idx), expected, 1e-12);
}

TEST(SelectSeedSets, SinglePossibleSet) {
  Rng rng(9);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> data;
  for (int i = 0; i < 10; ++i) data.push_back(project(m.sample(rng)));
  for (std::size_t cands : {1, 7, 1000}) {
    const auto sets = select_seed_sets(data, {cands, 10, 10}, rng);
    ASSERT_EQ(sets.size(), 1u);
    std::vector<std::size_t> all(10);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(sets[0].indices, all);
  }
}

TEST(SelectSeedSets, TooSmall) {
  std::vector<Pose2D> data(5, Pose2D{{{0, 0}, {1, 0}}});
  Rng rng(10);
  try {
    select_seed_sets(data, {}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetTooSmall);
  }
}

TEST(SelectSeedSets, ExhaustiveSmallDataset) {
  // 66 possible 10-subsets of 12 poses; with 3000 candidates all appear.
  Rng rng(11);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> data;
  for (int i = 0; i < 12; ++i) data.push_back(project(m.sample(rng)));
  const auto sets = select_seed_sets(data, {3000, 10, 100}, rng);
  ASSERT_EQ(sets.size(), 66u);
  std::vector<double> brute;
  for (int drop1 = 0; drop1 < 12; ++drop1)
    for (int drop2 = drop1 + 1; drop2 < 12; ++drop2) {
      std::vector<std::size_t> idx;
      for (int i = 0; i < 12; ++i)
        if (i != drop1 && i != drop2) idx.push_back(i);
      brute.push_back(total_variance(data, idx));
    }
  std::sort(brute.rbegin(), brute.rend());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_NEAR(sets[i].total_variance, brute[i], 1e-12);
    EXPECT_TRUE(std::is_sorted(sets[i].indices.begin(), sets[i].indices.end()));
    EXPECT_NEAR(total_variance(data, sets[i].indices), sets[i].total_variance, 1e-15);
  }
}

TEST(SelectSeedSets, PlantedSpreadPoses) {
  Rng rng(12);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> data(990, project(m.sample(rng)));
  for (int i = 0; i < 10; ++i) data.push_back(project(m.sample(rng)));
  const auto sets = select_seed_sets(data, {}, rng);
  ASSERT_EQ(sets.size(), 10u);
  for (std::size_t i = 1; i < sets.size(); ++i) EXPECT_GE(sets[i - 1].total_variance, sets[i].total_variance);
  const auto& top = sets[0];
  EXPECT_TRUE(std::any_of(top.indices.begin(), top.indices.end(), [](std::size_t i) { return i >= 990; }));
  // Against 1000 independent random sets: the top set beats their 99th percentile.
  Rng other(13);
  std::vector<double> random_vars;
  std::vector<std::size_t> perm(data.size());
  for (int k = 0; k < 1000; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), other);
    std::vector<std::size_t> idx(perm.begin(), perm.begin() + 10);
    random_vars.push_back(total_variance(data, idx));
  }
  std::sort(random_vars.begin(), random_vars.end());
  EXPECT_GE(top.total_variance, random_vars[989]);
}

TEST(SelectSeedSets, Deterministic) {
  Rng gen(14);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> data;
  for (int i = 0; i < 200; ++i) data.push_back(project(m.sample(gen)));
  Rng a(5), b(5);
  const auto x = select_seed_sets(data, {}, a), y = select_seed_sets(data, {}, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].indices, y[i].indices);
    EXPECT_EQ(x[i].total_variance, y[i].total_variance);
  }
}
