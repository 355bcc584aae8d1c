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

#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "synthpose/checkpoint.hpp"
#include "synthpose/config.hpp"
#include "synthpose/error.hpp"
#include "synthpose/layout_io.hpp"
#include "synthpose/pose_io.hpp"
#include "synthpose/reference_model.hpp"
#include "synthpose/snapshot.hpp"
#include "test_util.hpp"

using namespace synthpose;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("synthpose_io_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

template <typename T>
void put(std::string& s, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));  // test hosts are little-endian
  s.append(b, sizeof(T));
}

void expect_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Snapshot, BytesMatchHandBuiltLayout) {
  const JointLayout chain(testutil::chain3_spec());
  SphericalParams s;
  s.joints.resize(3);
  s.joints[1].values = {1.0, 0.5, 0.25};
  s.joints[2].values = {1.2, 1.0, -2.0};
  s.joints[0] = s.joints[1];
  const double w = 1.0;
  const DistributionSet d = init_from_seeds(std::span(&s, 1), std::span(&w, 1), chain);

  std::string expected = "PGH1";
  put<std::uint32_t>(expected, 3);
  put<std::uint32_t>(expected, 50);
  auto axis_bin = [&](int joint, int comp, double v) { return make_axis(chain, joint, comp).bin_of(v); };
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 50; ++b) put<double>(expected, b == axis_bin(0, c, s.joints[0][c]) ? 1.0 : 0.0);
  for (int j = 1; j < 3; ++j)
    for (int c = 0; c < 3; ++c) {
      const int row = axis_bin(j - 1, c, s.joints[j - 1][c]), col = axis_bin(j, c, s.joints[j][c]);
      for (int r = 0; r < 50; ++r)
        for (int b = 0; b < 50; ++b) put<double>(expected, (r == row && b == col) ? 1.0 : 0.0);
    }
  EXPECT_EQ(encode_histograms(d), expected);
}

TEST(Snapshot, FileRoundTripBitExact) {
  const JointLayout& l = h36m17_layout();
  Rng rng(1);
  ReferenceModel m(l);
  std::vector<SphericalParams> seeds;
  for (int i = 0; i < 10; ++i) seeds.push_back(m.sample_params(rng));
  DistributionSet d = init_from_seeds(seeds, std::vector<double>(10, 0.1), l);
  for (int i = 0; i < 20; ++i) diffuse(d, 0.2);
  const fs::path stem = scratch("snap");
  save_snapshot(stem, d, 77);
  SnapshotManifest man;
  const DistributionSet back = load_snapshot(stem, l, &man);
  EXPECT_EQ(man.step, 20);
  EXPECT_EQ(man.rng_seed, 77u);
  EXPECT_EQ(man.layout_hash, l.hash());
  EXPECT_EQ(back.step(), 20);
  EXPECT_EQ(encode_histograms(back), encode_histograms(d));
  // different layout is rejected
  EXPECT_THROW(load_snapshot(stem, smpl24_layout()), Error);
  // truncated payload
  std::string bytes = encode_histograms(d);
  bytes.pop_back();
  DistributionSet other(l);
  expect_code(ErrorCode::kFormat, [&] { decode_histograms(bytes, other); });
  expect_code(ErrorCode::kFormat, [&] { decode_histograms("PGH2" + encode_histograms(d).substr(4), other); });
}

TEST(Checkpoint, RoundTripAndRejects) {
  Rng rng(2);
  const LifterParams p = LifterParams::initialize(17, 8, rng, Activation::kRelu);
  OptimizerState opt;
  std::vector<double> g(p.size(), 0.01);
  LifterParams q = p;
  adam_step(q, g, opt, 1e-3);
  const std::string bytes = encode_checkpoint(q, opt);
  const Checkpoint c = decode_checkpoint(bytes);
  EXPECT_EQ(c.params.values(), q.values());
  EXPECT_EQ(c.params.activation(), Activation::kRelu);
  EXPECT_EQ(c.params.width(), 8);
  EXPECT_EQ(c.optimizer.step, 1);
  EXPECT_EQ(c.optimizer.m, opt.m);
  EXPECT_EQ(c.optimizer.v, opt.v);
  EXPECT_EQ(encode_checkpoint(c.params, c.optimizer), bytes);
  const fs::path path = scratch("model.ckpt");
  save_checkpoint(path, q, opt);
  EXPECT_EQ(load_checkpoint(path).params.values(), q.values());
  expect_code(ErrorCode::kFormat, [&] { decode_checkpoint(bytes.substr(0, bytes.size() - 3)); });
  expect_code(ErrorCode::kFormat, [&] { decode_checkpoint("XXXX" + bytes.substr(4)); });
  expect_code(ErrorCode::kFormat, [&] { decode_checkpoint(bytes + "x"); });
}

TEST(PoseIo, LinesRoundTrip) {
  Rng rng(3);
  const Pose3D x = ReferenceModel(h36m17_layout()).sample(rng);
  const PoseRecord r = parse_pose_line(pose_line("a-1", "h36m17", x));
  EXPECT_EQ(r.id, "a-1");
  EXPECT_EQ(r.dims, 3);
  for (int j = 0; j < 17; ++j)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(r.joints[j][c], x.joints[j][c]);
  Pose2D p;
  p.joints = {{1.5, -2.25}, {0.125, 3.0}};
  const PoseRecord r2 = parse_pose_line(pose_line("b", "toy", p));
  EXPECT_EQ(r2.dims, 2);
  EXPECT_EQ(r2.joints[1][0], 0.125);
  expect_code(ErrorCode::kFormat, [] { parse_pose_line("{\"id\":\"x\",\"layout_id\":\"h\",\"joints\":[[1,2]],\"extra\":1}"); });
  expect_code(ErrorCode::kFormat, [] { parse_pose_line("not json"); });
  expect_code(ErrorCode::kFormat, [] { parse_pose_line("{\"id\":\"x\",\"layout_id\":\"h\",\"joints\":[[1,2],[1,2,3]]}"); });
}

TEST(PoseIo, FilesRoundTrip) {
  Rng rng(4);
  const auto poses = ReferenceModel(h36m17_layout()).sample(5, rng);
  const fs::path path = scratch("poses.jsonl");
  write_pose_file(path, "h36m17", poses, "gen");
  const auto back = read_poses_3d(path, "h36m17");
  ASSERT_EQ(back.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(back[i].joints, poses[i].joints);
  EXPECT_EQ(read_pose_file(path)[3].id, "gen-3");
  EXPECT_THROW(read_poses_3d(path, "smpl24"), Error);
  EXPECT_THROW(read_poses_2d(path), Error);
}

TEST(SeedIo, RoundTripAndStrictness) {
  AnnotatedPose2D a{"img/001.jpg", "h36m17", {}, {}};
  for (int j = 0; j < 17; ++j) {
    a.keypoints_px.push_back({100.0 + j, 200.5 - j});
    a.signs.push_back(j == 0 ? 0 : (j % 2 ? 1 : -1));
  }
  const std::string text = encode_seed_file({a, a});
  const auto back = decode_seed_file(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].image_ref, a.image_ref);
  EXPECT_EQ(back[1].keypoints_px, a.keypoints_px);
  EXPECT_EQ(back[1].signs, a.signs);
  EXPECT_EQ(encode_seed_file(back), text);
  EXPECT_THROW(decode_seed_file("[{\"image_ref\":\"x\"}]"), Error);
  EXPECT_THROW(decode_seed_file("{}"), Error);
}

TEST(LiftRequest, HeadSpecOverride) {
  nlohmann::json j = {{"layout_id", "h36m17"}, {"keypoints_px", nlohmann::json::array()}, {"signs", nlohmann::json::array()}};
  for (int i = 0; i < 17; ++i) {
    j["keypoints_px"].push_back({i, 2 * i});
    j["signs"].push_back(1);
  }
  const LiftRequest plain = parse_lift_request(j);
  EXPECT_TRUE(head_spec_for(plain, h36m17_layout()) == h36m17_layout().head());
  j["head_spec"] = {{"alpha", 1.2}, {"beta", 1.5}};
  const HeadTriangleSpec h = head_spec_for(parse_lift_request(j), h36m17_layout());
  EXPECT_EQ(h.alpha, 1.2);
  EXPECT_EQ(h.beta, 1.5);
  j["head_spec"] = {{"alpha", 1.0}, {"beta", 3.0}};
  EXPECT_THROW(head_spec_for(parse_lift_request(j), h36m17_layout()), Error);
}

TEST(Config, PrecedenceFileEnvFlags) {
  const fs::path file = scratch("cfg.json");
  std::ofstream(file) << R"({"epochs": 3, "batch_size": 16, "learning_rate": 0.01, "layout": "smpl24"})";
  ::setenv("SYNTHPOSE_BATCH_SIZE", "8", 1);
  ::setenv("SYNTHPOSE_LEARNING_RATE", "0.02", 1);
  const RunConfig c = resolve_config(file, {{"learning_rate", "0.5"}});
  ::unsetenv("SYNTHPOSE_BATCH_SIZE");
  ::unsetenv("SYNTHPOSE_LEARNING_RATE");
  EXPECT_EQ(c.train.epochs, 3);           // file
  EXPECT_EQ(c.train.batch_size, 8);       // env over file
  EXPECT_EQ(c.train.learning_rate, 0.5);  // flag over env
  EXPECT_EQ(c.layout, "smpl24");
  EXPECT_EQ(c.train.views, 4);            // default
}

TEST(Config, UnknownKeysAndBadTypesRejected) {
  RunConfig c;
  expect_code(ErrorCode::kConfig, [&] { apply_json(c, nlohmann::json{{"epoch", 3}}); });
  expect_code(ErrorCode::kConfig, [&] { apply_json(c, nlohmann::json{{"epochs", "three"}}); });
  expect_code(ErrorCode::kConfig, [&] { apply_string(c, "nope", "1"); });
  expect_code(ErrorCode::kConfig, [&] { apply_string(c, "epochs", "x"); });
  expect_code(ErrorCode::kConfig, [&] { resolve_config({}, {{"views", "0"}}); });
}

TEST(Config, ManifestAndHash) {
  RunConfig a, b;
  b.train.seed = 5;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a), config_hash(RunConfig{}));
  const auto m = run_manifest(b, "train", h36m17_layout().hash());
  EXPECT_EQ(m["command"], "train");
  EXPECT_EQ(m["rng_seed"], 5u);
  EXPECT_EQ(m["config"]["seed"], 5u);
  EXPECT_EQ(m["version"], kVersion);
  // every key round-trips through the JSON form
  RunConfig c;
  apply_json(c, to_json(b));
  EXPECT_EQ(config_hash(c), config_hash(b));
  EXPECT_EQ(config_keys().size(), to_json(a).size());
}
