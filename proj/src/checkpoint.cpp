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

#include "synthpose/checkpoint.hpp"

#include <cstdint>
#include <cstring>

#include "binary_io.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

using detail::put_le;

constexpr char kMagic[4] = {'S', 'P', 'C', 'K'};
constexpr const char* kWhat = "checkpoint";

template <typename T>
T get(std::string_view in, std::size_t& pos) {
  return detail::get_le<T>(in, pos, kWhat);
}

}  // namespace

std::string encode_checkpoint(const LifterParams& params, const OptimizerState& opt) {
  const std::size_t n = params.size();
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.joints()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.width()));
  put_le<std::uint32_t>(out, kResidualBlocks);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.activation()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.layers().size()));
  for (const DenseLayer& l : params.layers()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.in));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.out));
  }
  put_le<std::uint64_t>(out, n);
  for (double v : params.values()) put_le<double>(out, v);
  put_le<double>(out, opt.beta1);
  put_le<double>(out, opt.beta2);
  put_le<double>(out, opt.eps);
  put_le<std::int64_t>(out, opt.step);
  // Moments are written even before the first step (as zeros).
  for (std::size_t i = 0; i < n; ++i) put_le<double>(out, i < opt.m.size() ? opt.m[i] : 0.0);
  for (std::size_t i = 0; i < n; ++i) put_le<double>(out, i < opt.v.size() ? opt.v[i] : 0.0);
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::kFormat, "not a lifter checkpoint");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
  const auto joints = get<std::uint32_t>(bytes, pos);
  const auto width = get<std::uint32_t>(bytes, pos);
  const auto blocks = get<std::uint32_t>(bytes, pos);
  const auto act = get<std::uint32_t>(bytes, pos);
  if (blocks != kResidualBlocks) throw Error(ErrorCode::kFormat, "checkpoint has an unsupported block count");
  if (act > static_cast<std::uint32_t>(Activation::kRelu)) throw Error(ErrorCode::kFormat, "unknown activation");
  if (joints < 2 || joints > 4096 || width < 1 || width > (1u << 16))
    throw Error(ErrorCode::kFormat, "implausible checkpoint shape");
  Checkpoint ck{LifterParams(static_cast<int>(joints), static_cast<int>(width), static_cast<Activation>(act)), {}};
  const auto layer_count = get<std::uint32_t>(bytes, pos);
  if (layer_count != ck.params.layers().size()) throw Error(ErrorCode::kFormat, "checkpoint layer count mismatch");
  for (const DenseLayer& l : ck.params.layers()) {
    const auto in = get<std::uint32_t>(bytes, pos);
    const auto out = get<std::uint32_t>(bytes, pos);
    if (in != static_cast<std::uint32_t>(l.in) || out != static_cast<std::uint32_t>(l.out))
      throw Error(ErrorCode::kFormat, "checkpoint layer shape mismatch");
  }
  const auto n = get<std::uint64_t>(bytes, pos);
  if (n != ck.params.size()) throw Error(ErrorCode::kFormat, "checkpoint parameter count mismatch");
  for (double& v : ck.params.values()) v = get<double>(bytes, pos);
  ck.optimizer.beta1 = get<double>(bytes, pos);
  ck.optimizer.beta2 = get<double>(bytes, pos);
  ck.optimizer.eps = get<double>(bytes, pos);
  ck.optimizer.step = static_cast<long>(get<std::int64_t>(bytes, pos));
  ck.optimizer.m.resize(n);
  ck.optimizer.v.resize(n);
  for (double& v : ck.optimizer.m) v = get<double>(bytes, pos);
  for (double& v : ck.optimizer.v) v = get<double>(bytes, pos);
  if (pos != bytes.size()) throw Error(ErrorCode::kFormat, "trailing bytes in checkpoint");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const LifterParams& params, const OptimizerState& optimizer) {
  detail::write_file(path, encode_checkpoint(params, optimizer));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(detail::read_file(path)); }

}  // namespace synthpose
