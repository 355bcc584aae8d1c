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

// Run configuration. Sources, lowest to highest precedence:
//   built-in defaults < JSON config file < SYNTHPOSE_<KEY> env vars < CLI flags
// Unknown keys are rejected everywhere.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthpose/train.hpp"

namespace synthpose {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string layout = "h36m17";  // built-in id or layout file
  std::string seeds;              // seed annotation file
  std::string real_2d;            // 2D pose file used to weight the seeds
  std::string output_dir = "out";
  std::string h36m_dir;           // optional dataset root
  int reference_seeds = 0;        // > 0: draw seeds from the reference model instead of `seeds`
  std::uint64_t reference_seed_rng = 1;
  TrainConfig train;
};

// Every accepted key, in canonical order.
const std::vector<std::string>& config_keys();

// Applies the keys of a JSON object; throws Error(kConfig) on unknown keys
// or wrong types.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
// One key given as text (env var or flag value).
void apply_string(RunConfig& cfg, const std::string& key, const std::string& value);
// Reads SYNTHPOSE_<UPPERCASE_KEY> for every key.
void apply_env(RunConfig& cfg);

// defaults -> file (if non-empty) -> env -> flags; validates the result.
RunConfig resolve_config(const std::filesystem::path& file, const std::map<std::string, std::string>& flags);

nlohmann::ordered_json to_json(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

// Reproducibility record written next to every run's outputs.
nlohmann::ordered_json run_manifest(const RunConfig& cfg, const std::string& command,
                                    std::uint64_t layout_hash);
void write_manifest(const std::filesystem::path& path, const nlohmann::ordered_json& manifest);

}  // namespace synthpose
