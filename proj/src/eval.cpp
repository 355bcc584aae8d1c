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

#include "synthpose/eval.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "json.hpp"
#include "synthpose/camera.hpp"
#include "synthpose/error.hpp"

namespace synthpose {
namespace {

std::vector<Vec3> aligned_errors(const Pose3D& pred, const Pose3D& gt, bool rescale) {
  if (pred.size() != gt.size() || gt.size() == 0)
    throw Error(ErrorCode::kShapeMismatch, "pred and gt differ in joint count");
  const Vec3 pr = pred.joints[0], gr = gt.joints[0];
  Pose3D p, g;
  p.joints.reserve(pred.size());
  g.joints.reserve(gt.size());
  for (const Vec3& v : pred.joints) p.joints.push_back(v - pr);
  for (const Vec3& v : gt.joints) g.joints.push_back(v - gr);
  double s = 1.0;
  if (rescale) {
    const double np = frobenius_norm(p);
    if (!(np > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "cannot rescale a zero-norm prediction");
    s = frobenius_norm(g) / np;
  }
  std::vector<Vec3> err(p.size());
  for (std::size_t q = 0; q < p.size(); ++q) err[q] = s * p.joints[q] - g.joints[q];
  return err;
}

// Rows [begin, end) processed on up to hardware_concurrency threads; each row
// is written by exactly one thread so results do not depend on scheduling.
template <typename F>
void parallel_rows(std::size_t count, F&& f) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min<std::size_t>(hw, std::max<std::size_t>(1, count / 256));
  if (threads <= 1) {
    f(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back([&f, b, e] { f(b, e); });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> flatten_normalized(std::span<const Pose2D> poses, std::size_t& dim) {
  std::vector<double> out;
  dim = poses.empty() ? 0 : poses[0].size() * 2;
  out.reserve(poses.size() * dim);
  for (const Pose2D& p : poses) {
    if (p.size() * 2 != dim) throw Error(ErrorCode::kShapeMismatch, "pose sets mix joint counts");
    const auto f = flatten(normalize_2d(p));
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

// Share of `queries` within some ball (centre i, squared radius r2[i]).
double coverage(const std::vector<double>& queries, std::size_t nq, const std::vector<double>& centres,
                const std::vector<double>& r2, std::size_t dim, const simd::Kernels& k) {
  std::vector<char> inside(nq, 0);
  parallel_rows(nq, [&](std::size_t b, std::size_t e) {
    std::vector<double> d(r2.size());
    for (std::size_t q = b; q < e; ++q) {
      k.sq_distances(queries.data() + q * dim, centres.data(), r2.size(), dim, d.data());
      for (std::size_t i = 0; i < r2.size(); ++i)
        if (d[i] <= r2[i]) {
          inside[q] = 1;
          break;
        }
    }
  });
  std::size_t n = 0;
  for (char c : inside) n += c;
  return static_cast<double>(n) / static_cast<double>(nq);
}

}  // namespace

double mpjpe(const Pose3D& pred, const Pose3D& gt, bool rescale) {
  const auto err = aligned_errors(pred, gt, rescale);
  double s = 0.0;
  for (const Vec3& e : err) s += norm(e);
  return 1000.0 * s / static_cast<double>(err.size());
}

double pck(const Pose3D& pred, const Pose3D& gt, double head_len, bool rescale) {
  const auto err = aligned_errors(pred, gt, rescale);
  if (err.size() < 2) throw Error(ErrorCode::kShapeMismatch, "pck needs at least one non-root joint");
  const double thr = 0.5 * head_len;
  std::size_t ok = 0;
  for (std::size_t q = 1; q < err.size(); ++q)
    if (norm(err[q]) <= thr) ++ok;
  return static_cast<double>(ok) / static_cast<double>(err.size() - 1);
}

double head_length(const Pose3D& gt, const JointLayout& layout) {
  const HeadTriangleSpec& h = layout.head();
  return norm(gt.joints.at(h.a) - gt.joints.at(h.c));
}

EvalReport evaluate(std::span<const Pose3D> preds, std::span<const Pose3D> gts, const JointLayout& layout,
                    bool rescale) {
  if (preds.size() != gts.size()) throw Error(ErrorCode::kShapeMismatch, "prediction and ground-truth counts differ");
  if (preds.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to evaluate");
  EvalReport r;
  r.samples = preds.size();
  r.rescaled = rescale;
  r.layout_id = layout.id();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (static_cast<int>(gts[i].size()) != layout.joint_count())
      throw Error(ErrorCode::kShapeMismatch, "ground truth does not match the layout");
    r.mpjpe_mm += mpjpe(preds[i], gts[i], rescale);
    r.pck += pck(preds[i], gts[i], head_length(gts[i], layout), rescale);
  }
  r.mpjpe_mm /= static_cast<double>(preds.size());
  r.pck /= static_cast<double>(preds.size());
  return r;
}

std::vector<double> knn_sq_radii(std::span<const double> points, std::size_t count, std::size_t dim, int k,
                                 const simd::Kernels& kernels) {
  if (k < 1) throw Error(ErrorCode::kConfig, "k must be positive");
  if (count <= static_cast<std::size_t>(k))
    throw Error(ErrorCode::kSetTooSmall, "need more than " + std::to_string(k) + " points, got " +
                                             std::to_string(count));
  std::vector<double> out(count);
  parallel_rows(count, [&](std::size_t b, std::size_t e) {
    std::vector<double> d(count);
    for (std::size_t i = b; i < e; ++i) {
      kernels.sq_distances(points.data() + i * dim, points.data(), count, dim, d.data());
      // Drop the point itself, keep duplicates of it.
      d[i] = d.back();
      d.pop_back();
      std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
      out[i] = d[k - 1];
      d.resize(count);
    }
  });
  return out;
}

PRReport precision_recall(std::span<const Pose2D> real, std::span<const Pose2D> synth, int k) {
  return precision_recall(real, synth, k, simd::active_kernels());
}

PRReport precision_recall(std::span<const Pose2D> real, std::span<const Pose2D> synth, int k,
                          const simd::Kernels& kernels) {
  if (k < 1) throw Error(ErrorCode::kConfig, "k must be positive");
  const auto need = static_cast<std::size_t>(k) + 1;
  if (real.size() < need || synth.size() < need)
    throw Error(ErrorCode::kSetTooSmall, "precision/recall needs at least " + std::to_string(need) +
                                             " poses per set (real " + std::to_string(real.size()) + ", synth " +
                                             std::to_string(synth.size()) + ")");
  std::size_t dr = 0, ds = 0;
  const auto r = flatten_normalized(real, dr);
  const auto s = flatten_normalized(synth, ds);
  if (dr != ds) throw Error(ErrorCode::kShapeMismatch, "real and synthetic poses differ in joint count");
  const auto rr = knn_sq_radii(r, real.size(), dr, k, kernels);
  const auto rs = knn_sq_radii(s, synth.size(), ds, k, kernels);
  PRReport out;
  out.k = k;
  out.real_count = real.size();
  out.synth_count = synth.size();
  out.precision = coverage(s, synth.size(), r, rr, dr, kernels);
  out.recall = coverage(r, real.size(), s, rs, dr, kernels);
  return out;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["mpjpe_mm"] = r.mpjpe_mm;
  j["pck"] = r.pck;
  j["samples"] = r.samples;
  j["protocol"] = r.protocol;
  j["rescaled"] = r.rescaled;
  j["layout_id"] = r.layout_id;
  return j.dump(2);
}

std::string to_json(const PRReport& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["k"] = r.k;
  j["real_count"] = r.real_count;
  j["synth_count"] = r.synth_count;
  return j.dump(2);
}

}  // namespace synthpose
