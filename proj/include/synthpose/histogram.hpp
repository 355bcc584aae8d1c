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

#include <cstdint>
#include <span>
#include <vector>

#include "synthpose/simd/kernels.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

inline constexpr int kBins = 50;

// Uniform binning of one spherical component of one joint.
struct BinAxis {
  Interval domain;   // span covered by the bins
  Interval limits;   // admissible values; bins outside are masked
  int bins = kBins;
  simd::Boundary boundary = simd::Boundary::kReflect;

  double width() const { return domain.width() / bins; }
  // Values outside the domain clamp to the edge bins.
  int bin_of(double v) const;
  Interval bin_interval(int b) const;
  // Part of bin b inside the limits; width 0 for a point limit.
  Interval admissible(int b) const;
  bool valid(int b) const;
};

// Axis used for `component` of `joint`: theta spans [0, pi], phi [-pi, pi]
// (periodic when the limits cover the whole circle), rho spans its limits.
BinAxis make_axis(const JointLayout& layout, int joint, int component);

// Dense rows x cols grid of probabilities: row = parent bin, column = child
// bin. Root marginals are stored as a single-row histogram.
class Histogram {
 public:
  Histogram() = default;
  Histogram(BinAxis parent, BinAxis child);  // conditional
  explicit Histogram(BinAxis child);          // marginal

  bool is_marginal() const { return rows_ == 1 && marginal_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const BinAxis& parent_axis() const { return parent_; }
  const BinAxis& child_axis() const { return child_; }

  std::span<const double> row(int r) const { return {data_.data() + r * cols_, std::size_t(cols_)}; }
  std::span<double> row(int r) { return {data_.data() + r * cols_, std::size_t(cols_)}; }
  double& at(int r, int c) { return data_[r * cols_ + c]; }
  double at(int r, int c) const { return data_[r * cols_ + c]; }
  bool masked(int r, int c) const { return mask_[r * cols_ + c] == 0; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double row_sum(int r) const;
  double total() const;
  // Zeroes every masked bin.
  void apply_mask();
  // Rows with mass are scaled to sum to 1; empty rows stay zero.
  void normalize_rows();

  // One raw explicit step P + alpha * Laplacian(P), without masking or
  // renormalisation.
  void laplacian_step(double alpha, const simd::Kernels& k);

 private:
  BinAxis parent_;
  BinAxis child_;
  bool marginal_ = false;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> scratch_;
};

}  // namespace synthpose
