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

#include "synthpose/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "binary_io.hpp"
#include "synthpose/error.hpp"
#include "synthpose/layout_io.hpp"
#include "synthpose/simd/kernels.hpp"

namespace synthpose {
namespace {

using json = nlohmann::json;

enum class Kind { kString, kInt, kUInt, kDouble, kBool };

struct Field {
  const char* key;
  Kind kind;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

[[noreturn]] void config_error(const std::string& m) { throw Error(ErrorCode::kConfig, m); }

template <typename T>
T as(const json& v, const char* key, Kind kind) {
  const bool ok = (kind == Kind::kString && v.is_string()) || (kind == Kind::kBool && v.is_boolean()) ||
                  (kind == Kind::kInt && v.is_number_integer()) ||
                  (kind == Kind::kUInt && v.is_number_unsigned()) ||
                  (kind == Kind::kUInt && v.is_number_integer() && v.get<long long>() >= 0) ||
                  (kind == Kind::kDouble && v.is_number());
  if (!ok) config_error(std::string("config key '") + key + "' has the wrong type");
  return v.get<T>();
}

#define SP_FIELD(name, kind, type, member)                                                  \
  Field {                                                                                   \
    name, kind, [](RunConfig& c, const json& v) { c.member = as<type>(v, name, kind); },   \
        [](const RunConfig& c) { return json(c.member); }                                  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      SP_FIELD("layout", Kind::kString, std::string, layout),
      SP_FIELD("seeds", Kind::kString, std::string, seeds),
      SP_FIELD("real_2d", Kind::kString, std::string, real_2d),
      SP_FIELD("output_dir", Kind::kString, std::string, output_dir),
      SP_FIELD("h36m_dir", Kind::kString, std::string, h36m_dir),
      SP_FIELD("reference_seeds", Kind::kInt, int, reference_seeds),
      SP_FIELD("reference_seed_rng", Kind::kUInt, std::uint64_t, reference_seed_rng),
      SP_FIELD("seed", Kind::kUInt, std::uint64_t, train.seed),
      SP_FIELD("batch_size", Kind::kInt, int, train.batch_size),
      SP_FIELD("epochs", Kind::kInt, int, train.epochs),
      SP_FIELD("learning_rate", Kind::kDouble, double, train.learning_rate),
      SP_FIELD("views", Kind::kInt, int, train.views),
      SP_FIELD("lambda3d", Kind::kDouble, double, train.lambda3d),
      SP_FIELD("samples_per_epoch", Kind::kInt, long, train.samples_per_epoch),
      SP_FIELD("width", Kind::kInt, int, train.width),
      Field{"activation", Kind::kString,
            [](RunConfig& c, const json& v) {
              c.train.activation = parse_activation(as<std::string>(v, "activation", Kind::kString));
            },
            [](const RunConfig& c) { return json(activation_name(c.train.activation)); }},
      SP_FIELD("sigma0_azimuth", Kind::kDouble, double, train.view_schedule.sigma0_azimuth),
      SP_FIELD("growth_azimuth", Kind::kDouble, double, train.view_schedule.growth_azimuth),
      SP_FIELD("sigma0_tilt", Kind::kDouble, double, train.view_schedule.sigma0_tilt),
      SP_FIELD("growth_tilt", Kind::kDouble, double, train.view_schedule.growth_tilt),
      SP_FIELD("diffusion_base", Kind::kDouble, double, train.diffusion_base),
      SP_FIELD("diffusion", Kind::kBool, bool, train.diffusion),
  };
  return f;
}

#undef SP_FIELD

const Field* find_field(const std::string& key) {
  for (const Field& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

json parse_text(const Field& f, const std::string& value) {
  try {
    std::size_t used = 0;
    switch (f.kind) {
      case Kind::kString: return json(value);
      case Kind::kBool:
        if (value == "true" || value == "1") return json(true);
        if (value == "false" || value == "0") return json(false);
        break;
      case Kind::kInt: {
        const long long v = std::stoll(value, &used);
        if (used == value.size()) return json(v);
        break;
      }
      case Kind::kUInt: {
        if (!value.empty() && value[0] == '-') break;
        const unsigned long long v = std::stoull(value, &used);
        if (used == value.size()) return json(v);
        break;
      }
      case Kind::kDouble: {
        const double v = std::stod(value, &used);
        if (used == value.size()) return json(v);
        break;
      }
    }
  } catch (const std::exception&) {
  }
  config_error(std::string("cannot parse '") + value + "' for config key '" + f.key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Field* f = find_field(it.key());
    if (!f) config_error("unknown config key '" + it.key() + "'");
    f->set(cfg, it.value());
  }
}

void apply_string(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) config_error("unknown config key '" + key + "'");
  f->set(cfg, parse_text(*f, value));
}

void apply_env(RunConfig& cfg) {
  for (const Field& f : fields()) {
    std::string name = "SYNTHPOSE_";
    for (const char* p = f.key; *p; ++p) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* v = std::getenv(name.c_str())) apply_string(cfg, f.key, v);
  }
}

RunConfig resolve_config(const std::filesystem::path& file, const std::map<std::string, std::string>& flags) {
  RunConfig cfg;
  if (!file.empty()) {
    json j;
    try {
      j = json::parse(detail::read_file(file));
    } catch (const json::exception& e) {
      config_error(file.string() + ": " + e.what());
    }
    apply_json(cfg, j);
  }
  apply_env(cfg);
  for (const auto& [k, v] : flags) apply_string(cfg, k, v);
  cfg.train.validate();
  if (cfg.reference_seeds < 0) config_error("reference_seeds must be non-negative");
  return cfg;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  for (const Field& f : fields()) j[f.key] = f.get(cfg);
  return j;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(to_json(cfg).dump()); }

nlohmann::ordered_json run_manifest(const RunConfig& cfg, const std::string& command, std::uint64_t layout_hash) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = to_json(cfg);
  m["config_hash"] = config_hash(cfg);
  m["rng_seed"] = cfg.train.seed;
  m["layout_hash"] = layout_hash;
  m["simd"] = std::string(simd::to_string(simd::active_kernels().isa));
  return m;
}

void write_manifest(const std::filesystem::path& path, const nlohmann::ordered_json& manifest) {
  detail::write_file(path, manifest.dump(2) + "\n");
}

}  // namespace synthpose
