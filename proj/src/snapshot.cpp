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

#include "synthpose/snapshot.hpp"

#include <cstring>

#include "binary_io.hpp"
#include "json.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

using detail::get_le;
using detail::put_le;
using detail::read_file;
using detail::write_file;

constexpr char kMagic[4] = {'P', 'G', 'H', '1'};

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  std::filesystem::path p = stem;
  p += ext;
  return p;
}

}  // namespace

std::string encode_histograms(const DistributionSet& dist) {
  const JointLayout& layout = dist.layout();
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layout.joint_count()));
  put_le<std::uint32_t>(out, kBins);
  for (int c = 0; c < kComponentCount; ++c)
    for (double v : dist.histogram(0, c).data()) put_le<double>(out, v);
  for (int j : layout.markov_order()) {
    if (j == 0) continue;
    for (int c = 0; c < kComponentCount; ++c)
      for (double v : dist.histogram(j, c).data()) put_le<double>(out, v);
  }
  return out;
}

void decode_histograms(std::string_view bytes, DistributionSet& dist) {
  const JointLayout& layout = dist.layout();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::kFormat, "not a PGH1 histogram snapshot");
  std::size_t pos = 4;
  const auto joints = get_le<std::uint32_t>(bytes, pos, "histogram snapshot");
  const auto bins = get_le<std::uint32_t>(bytes, pos, "histogram snapshot");
  if (joints != static_cast<std::uint32_t>(layout.joint_count()) || bins != kBins)
    throw Error(ErrorCode::kFormat, "histogram snapshot shape does not match the layout");
  for (int c = 0; c < kComponentCount; ++c)
    for (double& v : dist.histogram(0, c).data()) v = get_le<double>(bytes, pos, "histogram snapshot");
  for (int j : layout.markov_order()) {
    if (j == 0) continue;
    for (int c = 0; c < kComponentCount; ++c)
      for (double& v : dist.histogram(j, c).data()) v = get_le<double>(bytes, pos, "histogram snapshot");
  }
  if (pos != bytes.size()) throw Error(ErrorCode::kFormat, "trailing bytes in histogram snapshot");
}

std::string encode_manifest(const SnapshotManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "PGH1";
  j["layout_id"] = m.layout_id;
  j["layout_hash"] = m.layout_hash;
  j["t"] = m.step;
  j["rng_seed"] = m.rng_seed;
  return j.dump(2) + "\n";
}

SnapshotManifest decode_manifest(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "PGH1") throw Error(ErrorCode::kFormat, "unknown snapshot format");
    SnapshotManifest m;
    m.layout_id = j.at("layout_id").get<std::string>();
    m.layout_hash = j.at("layout_hash").get<std::uint64_t>();
    m.step = j.at("t").get<long>();
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("snapshot manifest: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& stem, const DistributionSet& dist, std::uint64_t rng_seed) {
  write_file(with_ext(stem, ".pgh"), encode_histograms(dist));
  SnapshotManifest m{dist.layout().id(), dist.layout().hash(), dist.step(), rng_seed};
  write_file(with_ext(stem, ".json"), encode_manifest(m));
}

DistributionSet load_snapshot(const std::filesystem::path& stem, const JointLayout& layout,
                              SnapshotManifest* manifest) {
  const SnapshotManifest m = decode_manifest(read_file(with_ext(stem, ".json")));
  if (m.layout_hash != layout.hash())
    throw Error(ErrorCode::kFormat, "snapshot was written for a different layout (" + m.layout_id + ")");
  DistributionSet dist(layout);
  decode_histograms(read_file(with_ext(stem, ".pgh")), dist);
  dist.set_step(m.step);
  if (manifest) *manifest = m;
  return dist;
}

}  // namespace synthpose
