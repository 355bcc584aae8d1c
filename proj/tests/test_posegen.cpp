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

#include <utility>

#include <algorithm>
#include <set>

#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"
#include "synthpose/posegen.hpp"
#include "synthpose/reference_model.hpp"
#include "test_util.hpp"

using namespace synthpose;
using synthpose::testutil::kPi;

namespace {

BinAxis unit_axis(int bins = kBins) {
  BinAxis a;
  a.domain = {0.0, 1.0};
  a.limits = {0.0, 1.0};
  a.bins = bins;
  return a;
}

std::vector<std::uint64_t> zeros(std::size_t n) { return std::vector<std::uint64_t>(n, 0); }

DistributionSet single_seed(const JointLayout& l, std::uint64_t seed, SphericalParams* out = nullptr) {
  Rng rng(seed);
  SphericalParams s = testutil::random_params(l, rng);
  if (out) *out = s;
  const double w = 1.0;
  return init_from_seeds(std::span(&s, 1), std::span(&w, 1), l);
}

void expect_rows_normalized(const DistributionSet& d) {
  for (int j = 0; j < d.layout().joint_count(); ++j)
    for (int c = 0; c < 3; ++c) {
      const Histogram& h = d.histogram(j, c);
      for (int r = 0; r < h.rows(); ++r) {
        const double s = h.row_sum(r);
        if (s > 0.0) {
          ASSERT_NEAR(s, 1.0, 1e-9) << "joint " << j << " comp " << c << " row " << r;
        }
        for (int b = 0; b < h.cols(); ++b) {
          if (h.masked(r, b)) {
            ASSERT_EQ(h.at(r, b), 0.0);
          }
        }
      }
    }
}

int support(const DistributionSet& d, double eps) {
  int n = 0;
  for (int j = 0; j < d.layout().joint_count(); ++j)
    for (int c = 0; c < 3; ++c)
      for (double v : d.histogram(j, c).data()) n += v > eps;
  return n;
}

// h36m with narrowed knee angles so some bins are masked.
JointLayout masked_layout() {
  LayoutSpec s = h36m17_layout().spec();
  s.id = "h36m17-masked";
  s.range_limits[2][1] = Interval{0.3, 2.0};
  s.range_limits[5][2] = Interval{-1.0, 1.5};
  return JointLayout(s);
}

}  // namespace

TEST(BinAxis, BinningAndIntervals) {
  const BinAxis a = unit_axis(10);
  EXPECT_EQ(a.bin_of(0.0), 0);
  EXPECT_EQ(a.bin_of(0.05), 0);
  EXPECT_EQ(a.bin_of(0.15), 1);
  EXPECT_EQ(a.bin_of(1.0), 9);
  EXPECT_EQ(a.bin_of(-3.0), 0);
  EXPECT_EQ(a.bin_of(7.0), 9);
  EXPECT_NEAR(a.bin_interval(3).lo, 0.3, 1e-15);
  EXPECT_NEAR(a.bin_interval(3).hi, 0.4, 1e-15);
  BinAxis m = a;
  m.limits = {0.25, 0.55};
  EXPECT_FALSE(m.valid(1));
  EXPECT_TRUE(m.valid(2));
  EXPECT_TRUE(m.valid(5));
  EXPECT_FALSE(m.valid(6));
  EXPECT_NEAR(m.admissible(2).lo, 0.25, 1e-15);
}

TEST(BinAxis, PhiPeriodicOnlyOnFullCircle) {
  const JointLayout& l = h36m17_layout();
  EXPECT_EQ(make_axis(l, 3, 2).boundary, simd::Boundary::kPeriodic);
  EXPECT_EQ(make_axis(l, 3, 1).boundary, simd::Boundary::kReflect);
  EXPECT_EQ(make_axis(masked_layout(), 5, 2).boundary, simd::Boundary::kReflect);
}

TEST(Distribution, WiringMatchesMarkovTree) {
  const JointLayout& l = h36m17_layout();
  DistributionSet d(l);
  EXPECT_EQ(d.conditional_count(), 48);
  for (int c = 0; c < 3; ++c) EXPECT_TRUE(d.histogram(0, c).is_marginal());
  for (int j = 1; j < 17; ++j)
    for (int c = 0; c < 3; ++c) {
      const Histogram& h = d.histogram(j, c);
      EXPECT_EQ(h.rows(), 50);
      EXPECT_EQ(h.cols(), 50);
      EXPECT_TRUE(h.parent_axis().limits == l.limits(l.markov_parent(j))[c]);
      EXPECT_TRUE(h.child_axis().limits == l.limits(j)[c]);
    }
}

TEST(SeedWeights, SingleSeed) {
  Rng rng(1);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> real, seeds{project(m.sample(rng))};
  for (int i = 0; i < 20; ++i) real.push_back(project(m.sample(rng)));
  const auto w = seed_weights(real, seeds);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0], 1.0);
}

TEST(SeedWeights, IdenticalSeedsTieToLowerIndex) {
  Rng rng(2);
  ReferenceModel m(h36m17_layout());
  const Pose2D s = project(m.sample(rng));
  std::vector<Pose2D> real, seeds{s, s};
  for (int i = 0; i < 20; ++i) real.push_back(project(m.sample(rng)));
  const auto w = seed_weights(real, seeds);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], 0.0);
}

TEST(SeedWeights, RecoversClusterProportions) {
  Rng rng(3);
  ReferenceModel m(h36m17_layout());
  std::vector<Pose2D> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(project(m.sample(rng)));
  const std::vector<double> props{0.5, 0.2, 0.1, 0.05, 0.05, 0.04, 0.03, 0.01, 0.01, 0.01};
  std::discrete_distribution<int> pick(props.begin(), props.end());
  std::normal_distribution<double> noise(0.0, 0.002);
  std::vector<Pose2D> real;
  std::vector<int> truth(10, 0);
  for (int i = 0; i < 5000; ++i) {
    const int k = pick(rng);
    ++truth[k];
    Pose2D p = seeds[k];
    for (auto& j : p.joints) j = {j[0] + noise(rng), j[1] + noise(rng)};
    real.push_back(p);
  }
  const auto w = seed_weights(real, seeds);
  double sum = 0;
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(w[k], props[k], 0.02) << k;
    EXPECT_NEAR(w[k], truth[k] / 5000.0, 1e-12) << k;
    sum += w[k];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SeedWeights, EmptyInput) {
  std::vector<Pose2D> none, one{Pose2D{{{0, 0}, {1, 0}}}};
  EXPECT_THROW(seed_weights(none, one), Error);
  EXPECT_THROW(seed_weights(one, none), Error);
}

TEST(InitFromSeeds, SingleSeedOneBinPerHistogram) {
  const JointLayout& l = h36m17_layout();
  const DistributionSet d = single_seed(l, 4);
  EXPECT_EQ(d.step(), 0);
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 3; ++c) {
      int nz = 0;
      double mass = 0;
      for (double v : d.histogram(j, c).data()) {
        nz += v != 0.0;
        if (v != 0.0) mass = v;
      }
      EXPECT_EQ(nz, 1);
      EXPECT_EQ(mass, 1.0);
    }
}

TEST(InitFromSeeds, SharedParentSplitsRow) {
  const JointLayout& l = h36m17_layout();
  Rng rng(5);
  SphericalParams a = testutil::random_params(l, rng);
  SphericalParams b = a;
  // joint 3 (ankle) conditioned on joint 2: same parent, different child theta
  b.joints[3][1] = a.joints[3][1] < 1.5 ? a.joints[3][1] + 1.0 : a.joints[3][1] - 1.0;
  const std::vector<SphericalParams> seeds{a, b};
  const std::vector<double> w{0.5, 0.5};
  const DistributionSet d = init_from_seeds(seeds, w, l);
  const Histogram& h = d.histogram(3, 1);
  const int row = h.parent_axis().bin_of(a.joints[2][1]);
  EXPECT_EQ(h.at(row, h.child_axis().bin_of(a.joints[3][1])), 0.5);
  EXPECT_EQ(h.at(row, h.child_axis().bin_of(b.joints[3][1])), 0.5);
  EXPECT_NEAR(h.total(), 1.0, 1e-15);
}

TEST(InitFromSeeds, RangeViolation) {
  const JointLayout& l = h36m17_layout();
  Rng rng(6);
  SphericalParams s = testutil::random_params(l, rng);
  s.joints[6][0] = 10.0;
  const double w = 1.0;
  try {
    init_from_seeds(std::span(&s, 1), std::span(&w, 1), l);
    FAIL();
  } catch (const RangeViolation& e) {
    EXPECT_EQ(e.joint(), 6);
  }
}

TEST(InitFromSeeds, TenSeedSupportStaysInRange) {
  const JointLayout& l = h36m17_layout();
  Rng rng(7);
  ReferenceModel m(l);
  std::vector<SphericalParams> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(m.sample_params(rng));
  const std::vector<double> w(10, 0.1);
  const DistributionSet d = init_from_seeds(seeds, w, l);
  EmpiricalTracker tr(d);
  for (int i = 0; i < 1000; ++i) {
    const GeneratedPose g = generate(d, tr, rng);
    for (int j = 0; j < 17; ++j)
      for (int c = 0; c < 3; ++c) ASSERT_TRUE(l.limits(j)[c].contains(g.params.joints[j][c]));
  }
}

TEST(Diffuse, ZeroAlphaIsIdentity) {
  const JointLayout& l = h36m17_layout();
  DistributionSet d = single_seed(l, 8);
  const DistributionSet before = d;
  diffuse(d, 0.0);
  EXPECT_EQ(d.step(), 1);
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 3; ++c) {
      const std::span<const double> a = std::as_const(d).histogram(j, c).data(), b = before.histogram(j, c).data();
      ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST(Diffuse, SingleInteriorBinFivePoint) {
  Histogram h(unit_axis(), unit_axis());
  h.at(20, 30) = 1.0;
  h.laplacian_step(0.1, simd::scalar_kernels());
  EXPECT_NEAR(h.at(20, 30), 0.6, 1e-15);
  EXPECT_NEAR(h.at(19, 30), 0.1, 1e-15);
  EXPECT_NEAR(h.at(21, 30), 0.1, 1e-15);
  EXPECT_NEAR(h.at(20, 29), 0.1, 1e-15);
  EXPECT_NEAR(h.at(20, 31), 0.1, 1e-15);
  EXPECT_NEAR(h.total(), 1.0, 1e-15);
}

TEST(Diffuse, UnstableCoefficient) {
  DistributionSet d = single_seed(h36m17_layout(), 9);
  try {
    diffuse(d, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableCoefficient);
  }
  EXPECT_THROW(diffuse(d, -0.01), Error);
  EXPECT_NO_THROW(diffuse(d, 0.249));
}

TEST(Diffuse, RawStepConservesMass) {
  Rng rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const JointLayout& l = h36m17_layout();
  DistributionSet d(l);
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 3; ++c) {
      Histogram h = d.histogram(j, c);
      for (double& v : h.data()) v = u(rng);
      const double before = h.total();
      h.laplacian_step(0.2, simd::active_kernels());
      EXPECT_NEAR(h.total(), before, 1e-9 * before);
    }
}

TEST(Diffuse, RowsNormalizedAndMaskHeldProperty) {
  const JointLayout l = masked_layout();
  Rng rng(11);
  ReferenceModel m(h36m17_layout());
  std::vector<SphericalParams> seeds;
  while (seeds.size() < 5) {
    SphericalParams p = m.sample_params(rng);
    bool ok = true;
    for (int j = 0; j < 17; ++j)
      for (int c = 0; c < 3; ++c) ok &= l.limits(j)[c].contains(p.joints[j][c]);
    if (ok) seeds.push_back(p);
  }
  const std::vector<double> w(5, 0.2);
  DistributionSet d = init_from_seeds(seeds, w, l);
  std::vector<double> alpha(17);
  std::uniform_real_distribution<double> a(0.0, 0.249);
  for (int step = 0; step < 300; ++step) {
    for (double& x : alpha) x = a(rng);
    diffuse(d, alpha);
    expect_rows_normalized(d);
  }
  EXPECT_EQ(d.step(), 300);
}

TEST(Diffuse, SupportGrowsMonotonically) {
  DistributionSet d = single_seed(h36m17_layout(), 12);
  int prev_fine = support(d, 1e-12);
  std::vector<int> checkpoints{support(d, 1e-6)};
  for (int t = 1; t <= 3000; ++t) {
    diffuse(d, 0.2);
    const int s = support(d, 1e-12);
    ASSERT_GE(s, prev_fine) << "step " << t;
    prev_fine = s;
    if (t == 200 || t == 1000 || t == 3000) checkpoints.push_back(support(d, 1e-6));
  }
  // Strict growth until every bin of the grid is populated.
  int bins = 0;
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 3; ++c) bins += static_cast<int>(d.histogram(j, c).data().size());
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i - 1] < bins) {
      EXPECT_GT(checkpoints[i], checkpoints[i - 1]) << "checkpoint " << i;
    } else {
      EXPECT_EQ(checkpoints[i], bins) << "checkpoint " << i;
    }
  }
  EXPECT_GT(checkpoints[1], checkpoints[0]);
}

TEST(DiffusionAlpha, Schedule) {
  DiffusionSchedule s;
  const std::vector<double> prev{1.0, 2.0, 0.0};
  const std::vector<double> now{1.0, 2.0 - 10.0 * 4, 1e9};
  const auto a = diffusion_alpha(s, now, prev, 4);
  EXPECT_DOUBLE_EQ(a[0], 1e-5);
  EXPECT_NEAR(a[1], 1e-4, 1e-18);
  EXPECT_EQ(a[2], kMaxDiffusionCoefficient);
  for (double v : a) EXPECT_GE(v, s.base);
}

TEST(DiffusionAlpha, NextUsesMemory) {
  DiffusionSchedule s{1e-5, 2, {}};
  const std::vector<double> l1{0.5, 0.5}, l2{0.5, 20.5};
  const auto a1 = next_diffusion_alpha(s, l1);
  EXPECT_EQ(a1[0], 1e-5);
  EXPECT_EQ(a1[1], 1e-5);
  const auto a2 = next_diffusion_alpha(s, l2);
  EXPECT_DOUBLE_EQ(a2[0], 1e-5);
  EXPECT_NEAR(a2[1], 1e-4, 1e-18);
}

TEST(SampleBin, OnePositiveBin) {
  Rng rng(13);
  std::vector<double> row(kBins, 0.0);
  row[17] = 1.0;
  auto counts = zeros(kBins);
  const BinAxis ax = unit_axis();
  for (int i = 0; i < 1000; ++i) {
    const BinSample s = sample_bin(row, counts, i, ax, rng);
    ASSERT_EQ(s.bin, 17);
    ASSERT_GE(s.value, ax.bin_interval(17).lo);
    ASSERT_LE(s.value, ax.bin_interval(17).hi);
    ++counts[17];
  }
}

TEST(SampleBin, OversampledBinSkipped) {
  Rng rng(14);
  std::vector<double> row{0.5, 0.5};
  std::vector<std::uint64_t> counts{10, 0};
  const BinAxis ax = unit_axis(2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_bin(row, counts, 10, ax, rng).bin, 1);
}

TEST(SampleBin, EmptyRow) {
  Rng rng(15);
  std::vector<double> row(kBins, 0.0);
  EXPECT_THROW(sample_bin(row, zeros(kBins), 0, unit_axis(), rng), EmptyRow);
}

TEST(SampleBin, UniformChiSquare) {
  Rng rng(16);
  std::vector<double> row(5, 0.2);
  std::vector<std::uint64_t> counts(5, 0);
  const BinAxis ax = unit_axis(5);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ++counts[sample_bin(row, counts, i, ax, rng).bin];
  double chi2 = 0;
  for (auto c : counts) {
    EXPECT_NEAR(c / double(draws), 0.2, 0.01);
    chi2 += (c - draws / 5.0) * (c - draws / 5.0) / (draws / 5.0);
  }
  // chi-square critical value, 4 degrees of freedom, p = 0.001
  EXPECT_LT(chi2, 18.467);
}

TEST(SampleBin, NeverReturnsZeroMassBin) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> row(kBins, 0.0);
  for (int b = 0; b < kBins; b += 3) row[b] = u(rng);
  double s = 0;
  for (double v : row) s += v;
  for (double& v : row) v /= s;
  auto counts = zeros(kBins);
  std::uint64_t total = 0;
  for (int i = 0; i < 1000000; ++i) {
    const BinSample b = sample_bin(row, counts, total, unit_axis(), rng);
    ASSERT_GT(row[b.bin], 0.0);
    ++counts[b.bin];
    ++total;
  }
}

TEST(SampleBin, OversamplingCorrectionBound) {
  for (int k : {10, 20, 50}) {
    Rng rng(18 + k);
    std::vector<double> row(kBins, 1.0 / kBins);
    auto counts = zeros(kBins);
    for (int i = 0; i < k * kBins; ++i) ++counts[sample_bin(row, counts, i, unit_axis(), rng).bin];
    const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LE(*mx - *mn, std::uint64_t(2 * k));
  }
}

TEST(Generate, SingleSeedReproducesSeed) {
  const JointLayout& l = h36m17_layout();
  SphericalParams seed;
  const DistributionSet d = single_seed(l, 19, &seed);
  EmpiricalTracker tr(d);
  Rng rng(20);
  for (int i = 0; i < 200; ++i) {
    const GeneratedPose g = generate(d, tr, rng);
    for (int j = 0; j < 17; ++j) {
      for (int c = 0; c < 3; ++c) {
        const double w = make_axis(l, j, c).width();
        const double diff = c == 2 ? angle_distance(g.params.joints[j][c], seed.joints[j][c])
                                   : std::abs(g.params.joints[j][c] - seed.joints[j][c]);
        ASSERT_LE(diff, w) << "joint " << j << " comp " << c;
      }
    }
  }
}

TEST(Generate, InvariantsAndBoneLengths) {
  const JointLayout& l = h36m17_layout();
  Rng rng(21);
  ReferenceModel m(l);
  std::vector<SphericalParams> seeds;
  for (int i = 0; i < 20; ++i) seeds.push_back(m.sample_params(rng));
  DistributionSet d = init_from_seeds(seeds, std::vector<double>(20, 0.05), l);
  for (int i = 0; i < 50; ++i) diffuse(d, 0.2);
  EmpiricalTracker tr(d);
  for (int i = 0; i < 2000; ++i) {
    const GeneratedPose g = generate(d, tr, rng);
    for (int j = 0; j < 17; ++j)
      for (int c = 0; c < 3; ++c) ASSERT_TRUE(l.limits(j)[c].contains(g.params.joints[j][c]));
    for (int j = 1; j < 17; ++j) {
      const double len = norm(g.pose.joints[j] - g.pose.joints[l.kinematic_parent(j)]);
      const BinAxis ax = make_axis(l, j, 0);
      const Interval iv = ax.bin_interval(ax.bin_of(g.params.joints[j][0]));
      ASSERT_GE(len, iv.lo - 1e-12);
      ASSERT_LE(len, iv.hi + 1e-12);
    }
  }
}

TEST(Generate, TrackerCountsOnlyIncrease) {
  const JointLayout& l = h36m17_layout();
  const DistributionSet d = single_seed(l, 22);
  EmpiricalTracker tr(d);
  Rng rng(23);
  std::uint64_t prev = 0;
  for (int i = 0; i < 10; ++i) {
    generate(d, tr, rng);
    const std::uint64_t t = tr.row_total(0, 0, 0);
    EXPECT_EQ(t, prev + 1);
    prev = t;
  }
}

TEST(Generate, BitReproducible) {
  const JointLayout& l = h36m17_layout();
  Rng init(24);
  ReferenceModel m(l);
  std::vector<SphericalParams> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(m.sample_params(init));
  DistributionSet d = init_from_seeds(seeds, std::vector<double>(10, 0.1), l);
  for (int i = 0; i < 10; ++i) diffuse(d, 0.1);
  auto stream = [&] {
    EmpiricalTracker tr(d);
    Rng rng(99);
    std::vector<double> out;
    for (int i = 0; i < 300; ++i)
      for (const Vec3& p : generate(d, tr, rng).pose.joints) out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  EXPECT_EQ(stream(), stream());
}
