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

#include "synthpose/error.hpp"

namespace synthpose {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateFrame: return "degenerate_frame";
    case ErrorCode::kRangeViolation: return "range_violation";
    case ErrorCode::kEmptyRow: return "empty_row";
    case ErrorCode::kUnstableCoefficient: return "unstable_coefficient";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kNoRealSolution: return "no_real_solution";
    case ErrorCode::kMissingSign: return "missing_sign";
    case ErrorCode::kDatasetTooSmall: return "dataset_too_small";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kNonFiniteGradient: return "non_finite_gradient";
    case ErrorCode::kDegeneratePose: return "degenerate_pose";
    case ErrorCode::kSetTooSmall: return "set_too_small";
    case ErrorCode::kInvalidLayout: return "invalid_layout";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace synthpose
