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

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "synthpose/camera.hpp"
#include "synthpose/checkpoint.hpp"
#include "synthpose/config.hpp"
#include "synthpose/error.hpp"
#include "synthpose/eval.hpp"
#include "synthpose/layout_io.hpp"
#include "synthpose/pose_io.hpp"
#include "synthpose/posegen.hpp"
#include "synthpose/reference_model.hpp"
#include "synthpose/seedlift.hpp"
#include "synthpose/service.hpp"
#include "synthpose/snapshot.hpp"
#include "synthpose/train.hpp"

namespace synthpose::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << text;
}

// Config flags shared by the commands that take a RunConfig.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void add_to(CLI::App* app) {
    app->add_option("--config", file, "JSON run configuration");
    for (const std::string& key : config_keys()) app->add_option("--" + key, values[key], "config key " + key);
  }
  RunConfig resolve(const CLI::App* app) const {
    std::map<std::string, std::string> set;
    for (const auto& [k, v] : values)
      if (app->count("--" + k) > 0) set[k] = v;
    return resolve_config(file, set);
  }
};

struct SeedData {
  std::vector<SphericalParams> params;
  std::vector<double> weights;
};

SeedData load_seeds(const RunConfig& cfg, const JointLayout& layout) {
  SeedData out;
  std::vector<Pose2D> seeds_2d;
  if (cfg.reference_seeds > 0) {
    const ReferenceModel model(layout);
    Rng rng(cfg.reference_seed_rng);
    for (int i = 0; i < cfg.reference_seeds; ++i) {
      const Pose3D p = model.sample(rng);
      out.params.push_back(cart_to_spherical(p, layout));
      seeds_2d.push_back(project(p));
    }
  } else {
    if (cfg.seeds.empty()) throw Error(ErrorCode::kConfig, "no seeds: set `seeds` or `reference_seeds`");
    for (const AnnotatedPose2D& s : read_seed_file(cfg.seeds)) {
      if (s.layout_id != layout.id())
        throw Error(ErrorCode::kConfig, "seed '" + s.image_ref + "' uses layout " + s.layout_id);
      out.params.push_back(cart_to_spherical(lift(s, layout).pose, layout));
      seeds_2d.push_back(Pose2D{s.keypoints_px});
    }
  }
  if (out.params.empty()) throw Error(ErrorCode::kEmptyInput, "seed set is empty");
  if (!cfg.real_2d.empty()) {
    out.weights = seed_weights(read_poses_2d(cfg.real_2d), seeds_2d);
  } else {
    out.weights.assign(out.params.size(), 1.0 / static_cast<double>(out.params.size()));
  }
  return out;
}

DistributionSet build_distribution(const RunConfig& cfg, const JointLayout& layout) {
  const SeedData seeds = load_seeds(cfg, layout);
  return init_from_seeds(seeds.params, seeds.weights, layout);
}

JointLayout layout_for_snapshot(const fs::path& stem, const std::string& layout_flag) {
  if (!layout_flag.empty()) return resolve_layout(layout_flag);
  std::ifstream in(fs::path(stem.string() + ".json"));
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + stem.string() + ".json");
  std::stringstream ss;
  ss << in.rdbuf();
  const SnapshotManifest m = decode_manifest(ss.str());
  const JointLayout* l = find_builtin_layout(m.layout_id);
  if (!l) throw Error(ErrorCode::kConfig, "snapshot layout '" + m.layout_id + "' is not built in; pass --layout");
  return *l;
}

std::vector<Pose2D> load_any_as_2d(const fs::path& path) {
  const auto records = read_pose_file(path);
  std::vector<Pose2D> out;
  out.reserve(records.size());
  for (const PoseRecord& r : records) {
    if (r.dims == 2) {
      Pose2D p;
      for (const auto& v : r.joints) p.joints.push_back({v[0], v[1]});
      out.push_back(std::move(p));
    } else {
      Pose3D p;
      for (const auto& v : r.joints) p.joints.push_back({v[0], v[1], v[2]});
      out.push_back(project(p));
    }
  }
  return out;
}

int cmd_seeds_select(const fs::path& dataset, std::size_t candidates, std::size_t set_size, std::size_t keep,
                     std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  const auto records = read_pose_file(dataset);
  std::vector<Pose2D> poses;
  for (const PoseRecord& r : records) {
    if (r.dims != 2) throw Error(ErrorCode::kFormat, "seeds-select expects 2D poses");
    Pose2D p;
    for (const auto& v : r.joints) p.joints.push_back({v[0], v[1]});
    poses.push_back(std::move(p));
  }
  Rng rng(seed);
  const auto sets = select_seed_sets(poses, SeedSelectionOptions{candidates, set_size, keep}, rng);
  fs::create_directories(out_dir);
  const int digits = std::max<int>(2, static_cast<int>(std::to_string(sets.size()).size()));
  ojson summary = ojson::array();
  out << "rank  total_variance  file\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    std::ostringstream name;
    name << "seedset-" << std::setw(digits) << std::setfill('0') << (s + 1) << ".json";
    std::vector<AnnotatedPose2D> seeds;
    ojson ids = ojson::array();
    for (std::size_t i : sets[s].indices) {
      AnnotatedPose2D a;
      a.image_ref = records[i].id;
      a.layout_id = records[i].layout_id;
      a.keypoints_px = poses[i].joints;
      a.signs.assign(poses[i].size(), 1);  // to be reviewed by the annotator
      seeds.push_back(std::move(a));
      ids.push_back(records[i].id);
    }
    write_text(out_dir / name.str(), encode_seed_file(seeds));
    ojson e;
    e["file"] = name.str();
    e["total_variance"] = sets[s].total_variance;
    e["indices"] = sets[s].indices;
    e["ids"] = std::move(ids);
    summary.push_back(std::move(e));
    out << std::setw(4) << (s + 1) << "  " << std::setw(14) << std::setprecision(6) << sets[s].total_variance << "  "
        << name.str() << "\n";
  }
  RunConfig cfg;
  cfg.train.seed = seed;
  cfg.output_dir = out_dir.string();
  ojson m = run_manifest(cfg, "seeds-select", 0);
  m["dataset"] = dataset.string();
  m["candidates"] = candidates;
  m["set_size"] = set_size;
  m["keep"] = keep;
  m["sets"] = std::move(summary);
  write_manifest(out_dir / "manifest.json", m);
  return 0;
}

int cmd_lift(const fs::path& seeds_path, const std::string& layout_flag, const fs::path& out_path,
             const fs::path& poses_out, std::ostream& out) {
  const auto seeds = read_seed_file(seeds_path);
  ojson results = ojson::array();
  std::vector<Pose3D> poses;
  std::string layout_id;
  out << "seed  image_ref  lambda_prop  clamped\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const JointLayout layout = resolve_layout(layout_flag.empty() ? seeds[i].layout_id : layout_flag);
    const LiftResult r = lift(seeds[i], layout);
    ojson j;
    j["image_ref"] = seeds[i].image_ref;
    j["layout_id"] = layout.id();
    const ojson lifted = lift_result_to_json(r);
    for (auto it = lifted.begin(); it != lifted.end(); ++it) j[it.key()] = it.value();
    results.push_back(std::move(j));
    poses.push_back(r.pose);
    layout_id = layout.id();
    int clamped = 0;
    for (bool c : r.clamped) clamped += c;
    out << std::setw(4) << i << "  " << seeds[i].image_ref << "  " << std::setprecision(8) << r.lambda_prop << "  "
        << clamped << "\n";
  }
  if (!out_path.empty()) write_text(out_path, results.dump(2) + "\n");
  if (!poses_out.empty()) write_pose_file(poses_out, layout_id, poses, "seed");
  return 0;
}

int cmd_init(const RunConfig& cfg, const fs::path& stem, std::ostream& out) {
  const JointLayout layout = resolve_layout(cfg.layout);
  const DistributionSet dist = build_distribution(cfg, layout);
  fs::create_directories(fs::path(stem).parent_path().empty() ? fs::path(".") : fs::path(stem).parent_path());
  save_snapshot(stem, dist, cfg.train.seed);
  out << "histograms written to " << stem.string() << ".pgh\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const fs::path& resume, std::ostream& out) {
  const JointLayout layout = resolve_layout(cfg.layout);
  DistributionSet dist = build_distribution(cfg, layout);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  write_manifest(dir / "manifest.json", run_manifest(cfg, "train", layout.hash()));
  std::ofstream log(dir / "train_log.jsonl", std::ios::binary);
  if (!log) throw Error(ErrorCode::kIo, "cannot write " + (dir / "train_log.jsonl").string());
  auto on_batch = [&](const BatchLog& b) { log << to_json_line(b) << '\n'; };
  TrainResult res;
  if (!resume.empty()) {
    Checkpoint ck = load_checkpoint(resume);
    res = train(cfg.train, dist, std::move(ck.params), std::move(ck.optimizer), on_batch);
  } else {
    res = train(cfg.train, dist, on_batch);
  }
  save_checkpoint(dir / "lifter.ckpt", res.params, res.optimizer);
  save_snapshot(dir / "histograms", dist, cfg.train.seed);
  out << "epoch  mean_total_loss\n";
  for (std::size_t e = 0; e < res.epoch_mean_total.size(); ++e)
    out << std::setw(5) << (e + 1) << "  " << std::setprecision(6) << res.epoch_mean_total[e] << "\n";
  return 0;
}

int cmd_gen(const fs::path& stem, const std::string& layout_flag, std::size_t count, std::uint64_t seed,
            const fs::path& out_path, bool project_2d, std::ostream& out) {
  const JointLayout layout = layout_for_snapshot(stem, layout_flag);
  const DistributionSet dist = load_snapshot(stem, layout);
  EmpiricalTracker tracker(dist);
  Rng rng(seed);
  std::ostringstream text;
  for (std::size_t i = 0; i < count; ++i) {
    const Pose3D p = generate(dist, tracker, rng).pose;
    const std::string id = "gen-" + std::to_string(i);
    text << (project_2d ? pose_line(id, layout.id(), project(p)) : pose_line(id, layout.id(), p)) << '\n';
  }
  write_text(out_path, text.str());
  RunConfig cfg;
  cfg.layout = layout.id();
  cfg.train.seed = seed;
  ojson m = run_manifest(cfg, "gen", layout.hash());
  m["snapshot"] = stem.string();
  m["count"] = count;
  m["projected"] = project_2d;
  write_manifest(out_path.string() + ".manifest.json", m);
  out << count << " poses written to " << out_path.string() << "\n";
  return 0;
}

int cmd_eval(const fs::path& ckpt, const std::string& layout_flag, const fs::path& gt_path,
             const fs::path& input_2d, std::size_t synthetic, std::uint64_t seed, bool rescale,
             const fs::path& out_path, std::ostream& out) {
  const JointLayout layout = resolve_layout(layout_flag.empty() ? "h36m17" : layout_flag);
  const Checkpoint ck = load_checkpoint(ckpt);
  if (ck.params.joints() != layout.joint_count())
    throw Error(ErrorCode::kShapeMismatch, "checkpoint joint count differs from the layout");
  std::vector<Pose3D> gts;
  std::vector<Pose2D> inputs;
  std::string source;
  if (!gt_path.empty()) {
    gts = read_poses_3d(gt_path, layout.id());
    if (!input_2d.empty()) {
      inputs = read_poses_2d(input_2d, layout.id());
      // Pixel keypoints: flip y to match the up-axis of the 3D poses.
      for (Pose2D& p : inputs)
        for (Vec2& v : p.joints) v[1] = -v[1];
    }
    source = gt_path.string();
  } else {
    if (synthetic == 0) throw Error(ErrorCode::kConfig, "eval needs --gt or --synthetic");
    Rng rng(seed);
    gts = ReferenceModel(layout).sample(synthetic, rng);
    source = "reference_model";
  }
  if (inputs.empty())
    for (const Pose3D& g : gts) {
      Pose3D c;
      for (const Vec3& v : g.joints) c.joints.push_back(v - g.joints[0]);
      inputs.push_back(project(c));
    }
  if (inputs.size() != gts.size()) throw Error(ErrorCode::kShapeMismatch, "2D input and 3D ground truth counts differ");
  std::vector<Pose3D> preds, flat;
  for (const Pose2D& in : inputs) {
    const Pose2D n = normalize_2d(in);
    preds.push_back(forward(ck.params, n));
    Pose3D z;
    for (const Vec2& v : n.joints) z.joints.push_back({v[0], v[1], 0.0});
    flat.push_back(std::move(z));
  }
  const EvalReport model = evaluate(preds, gts, layout, rescale);
  const EvalReport base = evaluate(flat, gts, layout, rescale);
  ojson j;
  j["source"] = source;
  j["model"] = ojson::parse(to_json(model));
  j["zero_depth_baseline"] = ojson::parse(to_json(base));
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  out << "                     mpjpe_mm      pck  samples\n";
  out << std::fixed << std::setprecision(3);
  out << "model           " << std::setw(13) << model.mpjpe_mm << std::setw(9) << model.pck << std::setw(9)
      << model.samples << "\n";
  out << "zero-depth      " << std::setw(13) << base.mpjpe_mm << std::setw(9) << base.pck << std::setw(9)
      << base.samples << "\n";
  return 0;
}

int cmd_pr(const fs::path& real, const fs::path& synth, int k, const fs::path& out_path, std::ostream& out) {
  const PRReport r = precision_recall(load_any_as_2d(real), load_any_as_2d(synth), k);
  if (!out_path.empty()) write_text(out_path, to_json(r) + "\n");
  out << std::fixed << std::setprecision(4) << "precision  " << r.precision << "\nrecall     " << r.recall
      << "\nk          " << r.k << "\nreal/synth " << r.real_count << "/" << r.synth_count << "\n";
  return 0;
}

int cmd_serve(const std::string& host, int port, const fs::path& output_dir, const fs::path& static_dir,
              std::ostream& out) {
  Service service(ServiceOptions{output_dir / "seeds", static_dir});
  httplib::Server server;
  service.register_routes(server);
  if (!server.bind_to_port(host, port)) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  out << "listening on http://" << host << ":" << port << std::endl;
  server.listen_after_bind();
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"synthpose: synthetic 3D pose generation and 2D-to-3D lifting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* sel = app.add_subcommand("seeds-select", "pick high-variance candidate seed sets from 2D poses");
  std::string sel_dataset, sel_out;
  std::size_t sel_candidates = 1000, sel_size = 10, sel_keep = 10;
  std::uint64_t sel_seed = 0;
  sel->add_option("--dataset", sel_dataset, "2D pose file (JSONL)")->required();
  sel->add_option("--candidates", sel_candidates, "random sets to draw");
  sel->add_option("--set-size", sel_size, "poses per set");
  sel->add_option("--keep", sel_keep, "sets to keep");
  sel->add_option("--seed", sel_seed, "rng seed");
  sel->add_option("--out", sel_out, "output directory")->required();

  auto* lf = app.add_subcommand("lift", "lift annotated seed poses to 3D");
  std::string lf_seeds, lf_layout, lf_out, lf_poses;
  lf->add_option("--seeds", lf_seeds, "seed file")->required();
  lf->add_option("--layout", lf_layout, "layout id or file (default: each seed's layout_id)");
  lf->add_option("--out", lf_out, "lift results (JSON)");
  lf->add_option("--poses-out", lf_poses, "lifted poses (JSONL)");

  auto* ini = app.add_subcommand("init", "build the initial histograms from the seeds");
  ConfigFlags ini_cfg;
  ini_cfg.add_to(ini);
  std::string ini_out;
  ini->add_option("--out", ini_out, "snapshot path stem (default <output_dir>/histograms_t0)");

  auto* tr = app.add_subcommand("train", "train the lifter on generated poses");
  ConfigFlags tr_cfg;
  tr_cfg.add_to(tr);
  std::string tr_resume;
  tr->add_option("--resume", tr_resume, "checkpoint to continue from");

  auto* gen = app.add_subcommand("gen", "sample poses from a histogram snapshot");
  std::string gen_snapshot, gen_layout, gen_out;
  std::size_t gen_count = 1000;
  std::uint64_t gen_seed = 0;
  bool gen_project = false;
  gen->add_option("--snapshot", gen_snapshot, "snapshot path stem")->required();
  gen->add_option("--layout", gen_layout, "layout id or file (default: from the snapshot)");
  gen->add_option("--count", gen_count, "poses to generate");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "pose file (JSONL)")->required();
  gen->add_flag("--project", gen_project, "write normalised 2D projections instead of 3D poses");

  auto* ev = app.add_subcommand("eval", "MPJPE / PCK of a checkpoint");
  std::string ev_ckpt, ev_layout, ev_gt, ev_2d, ev_out;
  std::size_t ev_synth = 0;
  std::uint64_t ev_seed = 0;
  bool ev_no_rescale = false;
  ev->add_option("--checkpoint", ev_ckpt, "lifter checkpoint")->required();
  ev->add_option("--layout", ev_layout, "layout id or file (default h36m17)");
  ev->add_option("--gt", ev_gt, "3D ground-truth pose file (metres)");
  ev->add_option("--input-2d", ev_2d, "matching 2D keypoints in pixels (default: project --gt)");
  ev->add_option("--synthetic", ev_synth, "evaluate on N reference-model poses instead");
  ev->add_option("--seed", ev_seed, "rng seed for --synthetic");
  ev->add_flag("--no-rescale", ev_no_rescale, "skip the Frobenius rescale of predictions");
  ev->add_option("--out", ev_out, "report (JSON)");

  auto* pr = app.add_subcommand("pr", "k-NN precision / recall between two pose files");
  std::string pr_real, pr_synth, pr_out;
  int pr_k = 10;
  pr->add_option("--real", pr_real, "real pose file")->required();
  pr->add_option("--synth", pr_synth, "synthetic pose file")->required();
  pr->add_option("--k", pr_k, "neighbour rank");
  pr->add_option("--out", pr_out, "report (JSON)");

  auto* sv = app.add_subcommand("serve", "HTTP service for the annotation tool");
  std::string sv_host = "127.0.0.1", sv_out = "out", sv_static;
  int sv_port = 8080;
  sv->add_option("--host", sv_host);
  sv->add_option("--port", sv_port);
  sv->add_option("--output_dir", sv_out, "seed store lives in <output_dir>/seeds");
  sv->add_option("--static", sv_static, "built UI directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (sel->parsed())
      return cmd_seeds_select(sel_dataset, sel_candidates, sel_size, sel_keep, sel_seed, sel_out, out);
    if (lf->parsed()) return cmd_lift(lf_seeds, lf_layout, lf_out, lf_poses, out);
    if (ini->parsed()) {
      const RunConfig cfg = ini_cfg.resolve(ini);
      return cmd_init(cfg, ini_out.empty() ? fs::path(cfg.output_dir) / "histograms_t0" : fs::path(ini_out), out);
    }
    if (tr->parsed()) return cmd_train(tr_cfg.resolve(tr), tr_resume, out);
    if (gen->parsed()) return cmd_gen(gen_snapshot, gen_layout, gen_count, gen_seed, gen_out, gen_project, out);
    if (ev->parsed())
      return cmd_eval(ev_ckpt, ev_layout, ev_gt, ev_2d, ev_synth, ev_seed, !ev_no_rescale, ev_out, out);
    if (pr->parsed()) return cmd_pr(pr_real, pr_synth, pr_k, pr_out, out);
    if (sv->parsed()) return cmd_serve(sv_host, sv_port, sv_out, sv_static, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace synthpose::cli
