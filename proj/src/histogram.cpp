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

#include "synthpose/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace synthpose {
namespace {
constexpr double kPi = std::numbers::pi;
}

int BinAxis::bin_of(double v) const {
  const double t = (v - domain.lo) / width();
  if (!(t > 0.0)) return 0;
  const int b = static_cast<int>(std::floor(t));
  return std::min(b, bins - 1);
}

Interval BinAxis::bin_interval(int b) const {
  const double w = width();
  const double lo = domain.lo + w * b;
  const double hi = (b == bins - 1) ? domain.hi : domain.lo + w * (b + 1);
  return {lo, hi};
}

Interval BinAxis::admissible(int b) const {
  const Interval iv = bin_interval(b);
  return {std::max(iv.lo, limits.lo), std::min(iv.hi, limits.hi)};
}

bool BinAxis::valid(int b) const {
  if (limits.width() == 0.0) return bin_of(limits.lo) == b;
  const Interval a = admissible(b);
  return a.hi > a.lo;
}

BinAxis make_axis(const JointLayout& layout, int joint, int component) {
  BinAxis axis;
  axis.limits = layout.limits(joint)[component];
  switch (component) {
    case 0: {
      Interval d = axis.limits;
      if (d.width() == 0.0) d = {d.lo - 1e-6, d.hi + 1e-6};
      axis.domain = d;
      break;
    }
    case 1:
      axis.domain = {0.0, kPi};
      break;
    default:
      axis.domain = {-kPi, kPi};
      if (axis.limits.lo <= -kPi && axis.limits.hi >= kPi) axis.boundary = simd::Boundary::kPeriodic;
      break;
  }
  return axis;
}

Histogram::Histogram(BinAxis parent, BinAxis child)
    : parent_(parent), child_(child), rows_(parent.bins), cols_(child.bins) {
  data_.assign(std::size_t(rows_) * cols_, 0.0);
  mask_.assign(data_.size(), 0);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) mask_[r * cols_ + c] = parent_.valid(r) && child_.valid(c);
}

Histogram::Histogram(BinAxis child) : child_(child), marginal_(true), rows_(1), cols_(child.bins) {
  data_.assign(cols_, 0.0);
  mask_.assign(cols_, 0);
  for (int c = 0; c < cols_; ++c) mask_[c] = child_.valid(c);
}

double Histogram::row_sum(int r) const {
  double s = 0.0;
  for (double v : row(r)) s += v;
  return s;
}

double Histogram::total() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

void Histogram::apply_mask() {
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!mask_[i]) data_[i] = 0.0;
}

void Histogram::normalize_rows() {
  for (int r = 0; r < rows_; ++r) {
    const double s = row_sum(r);
    if (s > 0.0) {
      for (double& v : row(r)) v /= s;
    }
  }
}

void Histogram::laplacian_step(double alpha, const simd::Kernels& k) {
  scratch_.resize(data_.size());
  const simd::Boundary row_bc = marginal_ ? simd::Boundary::kReflect : parent_.boundary;
  k.laplacian_step(data_.data(), scratch_.data(), rows_, cols_, alpha, row_bc, child_.boundary);
  data_.swap(scratch_);
}

}  // namespace synthpose
