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

#include "synthpose/pose_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

using json = nlohmann::json;

[[noreturn]] void format_error(const std::string& m) { throw Error(ErrorCode::kFormat, m); }

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) format_error(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) format_error(where + ": unknown key '" + it.key() + "'");
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) format_error(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) format_error(where + ": non-finite number");
  return d;
}

std::vector<Vec2> read_points2(const json& arr, const std::string& where) {
  if (!arr.is_array()) format_error(where + ": expected an array of [x, y]");
  std::vector<Vec2> out;
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2) format_error(where + ": each point needs two coordinates");
    out.push_back({finite_number(p[0], where), finite_number(p[1], where)});
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string pose_line(const std::string& id, const std::string& layout_id, const Pose3D& pose) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["layout_id"] = layout_id;
  json joints = json::array();
  for (const Vec3& p : pose.joints) joints.push_back({p[0], p[1], p[2]});
  j["joints"] = std::move(joints);
  return j.dump();
}

std::string pose_line(const std::string& id, const std::string& layout_id, const Pose2D& pose) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["layout_id"] = layout_id;
  json joints = json::array();
  for (const Vec2& p : pose.joints) joints.push_back({p[0], p[1]});
  j["joints"] = std::move(joints);
  return j.dump();
}

PoseRecord parse_pose_line(const std::string& line, std::size_t line_no) {
  const std::string where = "pose line " + std::to_string(line_no);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    format_error(where + ": " + e.what());
  }
  reject_unknown(j, {"id", "layout_id", "joints"}, where);
  PoseRecord r;
  if (j.contains("id")) {
    if (!j["id"].is_string()) format_error(where + ": id must be a string");
    r.id = j["id"].get<std::string>();
  }
  if (!j.contains("layout_id") || !j["layout_id"].is_string()) format_error(where + ": missing layout_id");
  r.layout_id = j["layout_id"].get<std::string>();
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty())
    format_error(where + ": missing joints");
  const auto& joints = j["joints"];
  r.dims = static_cast<int>(joints[0].is_array() ? joints[0].size() : 0);
  if (r.dims != 2 && r.dims != 3) format_error(where + ": joints must be [x,y] or [x,y,z]");
  for (const json& p : joints) {
    if (!p.is_array() || static_cast<int>(p.size()) != r.dims) format_error(where + ": inconsistent joint arity");
    std::array<double, 3> v{0, 0, 0};
    for (int d = 0; d < r.dims; ++d) v[d] = finite_number(p[d], where);
    r.joints.push_back(v);
  }
  return r;
}

std::vector<PoseRecord> read_pose_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<PoseRecord> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_pose_line(line, no));
  }
  return out;
}

void write_pose_file(const std::filesystem::path& path, const std::string& layout_id,
                     const std::vector<Pose3D>& poses, const std::string& id_prefix) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < poses.size(); ++i)
    out << pose_line(id_prefix + "-" + std::to_string(i), layout_id, poses[i]) << '\n';
}

void write_pose_file(const std::filesystem::path& path, const std::string& layout_id,
                     const std::vector<Pose2D>& poses, const std::string& id_prefix) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < poses.size(); ++i)
    out << pose_line(id_prefix + "-" + std::to_string(i), layout_id, poses[i]) << '\n';
}

namespace {

template <typename Pose>
std::vector<Pose> read_poses(const std::filesystem::path& path, const std::string& layout_id, int dims) {
  std::vector<Pose> out;
  std::size_t joints = 0;
  for (const PoseRecord& r : read_pose_file(path)) {
    if (r.dims != dims)
      format_error(path.string() + ": expected " + std::to_string(dims) + "D poses in record '" + r.id + "'");
    if (!layout_id.empty() && r.layout_id != layout_id)
      format_error(path.string() + ": record '" + r.id + "' uses layout " + r.layout_id + ", expected " + layout_id);
    if (joints == 0) joints = r.joints.size();
    if (r.joints.size() != joints) format_error(path.string() + ": records differ in joint count");
    Pose p;
    for (const auto& v : r.joints) {
      if constexpr (std::is_same_v<Pose, Pose3D>)
        p.joints.push_back({v[0], v[1], v[2]});
      else
        p.joints.push_back({v[0], v[1]});
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<Pose3D> read_poses_3d(const std::filesystem::path& path, const std::string& layout_id) {
  return read_poses<Pose3D>(path, layout_id, 3);
}

std::vector<Pose2D> read_poses_2d(const std::filesystem::path& path, const std::string& layout_id) {
  return read_poses<Pose2D>(path, layout_id, 2);
}

nlohmann::ordered_json seed_to_json(const AnnotatedPose2D& s) {
  nlohmann::ordered_json j;
  j["image_ref"] = s.image_ref;
  j["layout_id"] = s.layout_id;
  json kp = json::array();
  for (const Vec2& p : s.keypoints_px) kp.push_back({p[0], p[1]});
  j["keypoints_px"] = std::move(kp);
  j["signs"] = s.signs;
  return j;
}

AnnotatedPose2D seed_from_json(const json& j) {
  reject_unknown(j, {"image_ref", "layout_id", "keypoints_px", "signs"}, "seed");
  AnnotatedPose2D s;
  if (j.contains("image_ref")) {
    if (!j["image_ref"].is_string()) format_error("seed: image_ref must be a string");
    s.image_ref = j["image_ref"].get<std::string>();
  }
  if (!j.contains("layout_id") || !j["layout_id"].is_string()) format_error("seed: missing layout_id");
  s.layout_id = j["layout_id"].get<std::string>();
  if (!j.contains("keypoints_px")) format_error("seed: missing keypoints_px");
  s.keypoints_px = read_points2(j["keypoints_px"], "seed.keypoints_px");
  if (!j.contains("signs") || !j["signs"].is_array()) format_error("seed: missing signs");
  for (const json& v : j["signs"]) {
    if (!v.is_number_integer()) format_error("seed: signs must be integers (+1, -1, or 0 for unset)");
    s.signs.push_back(v.get<int>());
  }
  return s;
}

std::string encode_seed_file(const std::vector<AnnotatedPose2D>& seeds) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : seeds) arr.push_back(seed_to_json(s));
  return arr.dump(2) + "\n";
}

std::vector<AnnotatedPose2D> decode_seed_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    format_error(std::string("seed file: ") + e.what());
  }
  if (!j.is_array()) format_error("seed file: expected a JSON array");
  std::vector<AnnotatedPose2D> out;
  for (const json& e : j) out.push_back(seed_from_json(e));
  return out;
}

std::vector<AnnotatedPose2D> read_seed_file(const std::filesystem::path& path) {
  return decode_seed_file(detail::read_file(path));
}

nlohmann::ordered_json lift_result_to_json(const LiftResult& r) {
  nlohmann::ordered_json j;
  j["lambda_prop"] = r.lambda_prop;
  j["pixels_per_metre"] = r.pixels_per_metre;
  j["d_b"] = r.scale.d_b;
  j["d_c"] = r.scale.d_c;
  j["same_side"] = r.scale.same_side;
  j["both_roots_valid"] = r.scale.both_roots_valid;
  if (r.scale.both_roots_valid) j["other_lambda"] = r.scale.other_lambda;
  json joints = json::array();
  for (const Vec3& p : r.pose.joints) joints.push_back({p[0], p[1], p[2]});
  j["joints_3d"] = std::move(joints);
  json flags = json::array();
  for (bool b : r.clamped) flags.push_back(b);
  j["clamp_flags"] = std::move(flags);
  return j;
}

LiftRequest parse_lift_request(const json& j) {
  reject_unknown(j, {"image_ref", "layout_id", "keypoints_px", "signs", "head_spec"}, "lift request");
  LiftRequest r;
  json seed = j;
  seed.erase("head_spec");
  r.pose = seed_from_json(seed);
  if (j.contains("head_spec")) {
    const json& h = j["head_spec"];
    reject_unknown(h, {"alpha", "beta"}, "head_spec");
    if (h.contains("alpha")) r.alpha = finite_number(h["alpha"], "head_spec.alpha");
    if (h.contains("beta")) r.beta = finite_number(h["beta"], "head_spec.beta");
  }
  return r;
}

HeadTriangleSpec head_spec_for(const LiftRequest& req, const JointLayout& layout) {
  HeadTriangleSpec h = layout.head();
  if (req.alpha) h.alpha = *req.alpha;
  if (req.beta) h.beta = *req.beta;
  if (!(h.alpha > 0.0) || !(h.beta > 0.0) || h.alpha + 1.0 <= h.beta || h.beta + 1.0 <= h.alpha ||
      h.alpha + h.beta <= 1.0)
    format_error("head_spec: alpha and beta must be positive and satisfy the triangle inequality");
  return h;
}

}  // namespace synthpose
