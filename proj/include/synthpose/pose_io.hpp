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

// File formats exchanged between commands and the service.
//
// Pose files: one JSON object per line,
//   {"id": "...", "layout_id": "...", "joints": [[x,y,z], ...]}   (or [[x,y], ...])
// Seed files: JSON array of
//   {"image_ref": "...", "layout_id": "...", "keypoints_px": [[x,y], ...], "signs": [...]}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "synthpose/seedlift.hpp"
#include "synthpose/skeleton.hpp"

namespace synthpose {

struct PoseRecord {
  std::string id;
  std::string layout_id;
  int dims = 3;  // 2 or 3
  std::vector<std::array<double, 3>> joints;  // z unused when dims == 2
};

std::string pose_line(const std::string& id, const std::string& layout_id, const Pose3D& pose);
std::string pose_line(const std::string& id, const std::string& layout_id, const Pose2D& pose);
// Throws Error(kFormat) with the line number on malformed input.
PoseRecord parse_pose_line(const std::string& line, std::size_t line_no = 0);
std::vector<PoseRecord> read_pose_file(const std::filesystem::path& path);

void write_pose_file(const std::filesystem::path& path, const std::string& layout_id,
                     const std::vector<Pose3D>& poses, const std::string& id_prefix = "pose");
void write_pose_file(const std::filesystem::path& path, const std::string& layout_id,
                     const std::vector<Pose2D>& poses, const std::string& id_prefix = "pose");

// All records must have the requested dims and the same joint count; a
// non-empty `layout_id` must match every record.
std::vector<Pose3D> read_poses_3d(const std::filesystem::path& path, const std::string& layout_id = {});
std::vector<Pose2D> read_poses_2d(const std::filesystem::path& path, const std::string& layout_id = {});

nlohmann::ordered_json seed_to_json(const AnnotatedPose2D& seed);
AnnotatedPose2D seed_from_json(const nlohmann::json& j);
std::string encode_seed_file(const std::vector<AnnotatedPose2D>& seeds);
std::vector<AnnotatedPose2D> decode_seed_file(const std::string& text);
std::vector<AnnotatedPose2D> read_seed_file(const std::filesystem::path& path);

nlohmann::ordered_json lift_result_to_json(const LiftResult& r);

// HTTP/CLI lift request: {"layout_id", "keypoints_px", "signs", optional
// "head_spec": {"alpha", "beta"}}. The layout id resolves built-ins only.
struct LiftRequest {
  AnnotatedPose2D pose;
  std::optional<double> alpha;
  std::optional<double> beta;
};
LiftRequest parse_lift_request(const nlohmann::json& j);
HeadTriangleSpec head_spec_for(const LiftRequest& req, const JointLayout& layout);

}  // namespace synthpose
