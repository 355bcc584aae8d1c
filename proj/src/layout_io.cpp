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

#include "synthpose/layout_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kFormat, "layout file: " + msg); }

void reject_unknown(const ordered_json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing key '") + key + "'");
  return *it;
}

Interval parse_interval(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(where + " must be [lo, hi]");
  return Interval{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string serialize_layout(const LayoutSpec& spec) {
  ordered_json j;
  j["format_version"] = kLayoutFormatVersion;
  j["id"] = spec.id;
  j["joint_names"] = spec.joint_names;
  j["kinematic_parent"] = spec.kinematic_parent;
  j["markov_parent"] = spec.markov_parent;
  j["bone_lengths"] = spec.bone_lengths;
  ordered_json limits = ordered_json::array();
  for (const RangeLimits& r : spec.range_limits) {
    ordered_json e;
    for (int c = 0; c < kComponentCount; ++c) e[component_name(c)] = {r[c].lo, r[c].hi};
    limits.push_back(std::move(e));
  }
  j["range_limits"] = std::move(limits);
  j["root_anchor"] = spec.root_anchor;
  j["head_triangle"] = {{"joints", {spec.head.a, spec.head.b, spec.head.c}},
                        {"alpha", spec.head.alpha},
                        {"beta", spec.head.beta},
                        {"ab_length", spec.head.ab_length}};
  return j.dump(2) + "\n";
}

LayoutSpec parse_layout(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  reject_unknown(j,
                 {"format_version", "id", "joint_names", "kinematic_parent", "markov_parent",
                  "bone_lengths", "range_limits", "root_anchor", "head_triangle"},
                 "layout");
  const auto& ver = require(j, "format_version");
  if (!ver.is_number_integer() || ver.get<int>() != kLayoutFormatVersion)
    bad("unsupported format_version");
  LayoutSpec s;
  try {
    s.id = require(j, "id").get<std::string>();
    s.joint_names = require(j, "joint_names").get<std::vector<std::string>>();
    s.kinematic_parent = require(j, "kinematic_parent").get<std::vector<int>>();
    s.markov_parent = require(j, "markov_parent").get<std::vector<int>>();
    s.bone_lengths = require(j, "bone_lengths").get<std::vector<double>>();
    s.root_anchor = require(j, "root_anchor").get<int>();
  } catch (const nlohmann::json::type_error& e) {
    bad(e.what());
  }
  const auto& limits = require(j, "range_limits");
  if (!limits.is_array()) bad("range_limits must be an array");
  for (std::size_t i = 0; i < limits.size(); ++i) {
    const auto& e = limits[i];
    if (!e.is_object()) bad("range_limits entries must be objects");
    reject_unknown(e, {"rho", "theta", "phi"}, "range_limits");
    RangeLimits r;
    for (int c = 0; c < kComponentCount; ++c) {
      r[c] = parse_interval(require(e, component_name(c)),
                            "range_limits[" + std::to_string(i) + "]." + component_name(c));
    }
    s.range_limits.push_back(r);
  }
  const auto& head = require(j, "head_triangle");
  if (!head.is_object()) bad("head_triangle must be an object");
  reject_unknown(head, {"joints", "alpha", "beta", "ab_length"}, "head_triangle");
  try {
    const auto joints = require(head, "joints").get<std::vector<int>>();
    if (joints.size() != 3) bad("head_triangle.joints must list three joints");
    s.head.a = joints[0];
    s.head.b = joints[1];
    s.head.c = joints[2];
    s.head.alpha = require(head, "alpha").get<double>();
    s.head.beta = require(head, "beta").get<double>();
    s.head.ab_length = require(head, "ab_length").get<double>();
  } catch (const nlohmann::json::type_error& e) {
    bad(e.what());
  }
  return s;
}

JointLayout load_layout_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open layout file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return JointLayout(parse_layout(ss.str()));
}

void save_layout_file(const std::filesystem::path& path, const JointLayout& layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write layout file " + path.string());
  out << serialize_layout(layout.spec());
}

JointLayout resolve_layout(const std::string& id_or_path) {
  if (const JointLayout* builtin = find_builtin_layout(id_or_path)) return *builtin;
  return load_layout_file(id_or_path);
}

}  // namespace synthpose
