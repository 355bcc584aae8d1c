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

#include <stdexcept>
#include <string>
#include <string_view>

namespace synthpose {

// Stable identifiers; the string form is part of the HTTP error contract.
enum class ErrorCode {
  kDegenerateFrame,
  kRangeViolation,
  kEmptyRow,
  kUnstableCoefficient,
  kEmptyInput,
  kNoRealSolution,
  kMissingSign,
  kDatasetTooSmall,
  kShapeMismatch,
  kNonFiniteGradient,
  kDegeneratePose,
  kSetTooSmall,
  kInvalidLayout,
  kFormat,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Errors tied to a specific joint carry its index (-1 when not applicable).
class JointError : public Error {
 public:
  JointError(ErrorCode code, int joint, const std::string& what)
      : Error(code, what), joint_(joint) {}
  int joint() const noexcept { return joint_; }

 private:
  int joint_;
};

class DegenerateFrame : public JointError {
 public:
  explicit DegenerateFrame(int joint, const std::string& what = "degenerate local frame")
      : JointError(ErrorCode::kDegenerateFrame, joint, what) {}
};

class RangeViolation : public JointError {
 public:
  RangeViolation(int joint, int component, const std::string& what)
      : JointError(ErrorCode::kRangeViolation, joint, what), component_(component) {}
  int component() const noexcept { return component_; }

 private:
  int component_;
};

class EmptyRow : public JointError {
 public:
  EmptyRow(int joint, int component, const std::string& what)
      : JointError(ErrorCode::kEmptyRow, joint, what), component_(component) {}
  int component() const noexcept { return component_; }

 private:
  int component_;
};

class MissingSign : public JointError {
 public:
  explicit MissingSign(int joint)
      : JointError(ErrorCode::kMissingSign, joint,
                   "missing front/behind sign for joint " + std::to_string(joint)) {}
};

class NoRealSolution : public Error {
 public:
  NoRealSolution(const std::string& what, double best_residual)
      : Error(ErrorCode::kNoRealSolution, what), best_residual_(best_residual) {}
  // Smallest residual of the head-triangle system seen while searching.
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace synthpose
