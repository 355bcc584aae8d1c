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

// Layout files are JSON documents with a `format_version` field. The
// serializer is canonical (fixed key order, shortest round-trip doubles), so
// parse(serialize(x)) == x bit for bit and the text can be hashed.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "synthpose/skeleton.hpp"

namespace synthpose {

inline constexpr int kLayoutFormatVersion = 1;

std::string serialize_layout(const LayoutSpec& spec);
// Throws Error(kFormat) on malformed input, unknown keys or a version mismatch.
LayoutSpec parse_layout(std::string_view text);

JointLayout load_layout_file(const std::filesystem::path& path);
void save_layout_file(const std::filesystem::path& path, const JointLayout& layout);

// A built-in id ("h36m17", "smpl24") or a path to a layout file.
JointLayout resolve_layout(const std::string& id_or_path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace synthpose
