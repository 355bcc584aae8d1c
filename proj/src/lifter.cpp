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

#include "synthpose/lifter.hpp"

#include <algorithm>
#include <cmath>

#include "synthpose/error.hpp"
#include "synthpose/simd/kernels.hpp"

namespace synthpose {
namespace {

inline double act(Activation a, double z) {
  if (z > 0.0) return z;
  return a == Activation::kLeakyRelu ? kLeakySlope * z : 0.0;
}

inline double act_grad(Activation a, double z) {
  if (z > 0.0) return 1.0;
  return a == Activation::kLeakyRelu ? kLeakySlope : 0.0;
}

// Residuals are differences of unit-norm poses; anything within rounding of
// zero takes the zero subgradient.
inline double sign(double x) { return x > 1e-12 ? 1.0 : (x < -1e-12 ? -1.0 : 0.0); }

void dense(const simd::Kernels& k, const LifterParams& p, const DenseLayer& l, const double* in,
           std::size_t rows, double* out) {
  const double* v = p.values().data();
  k.gemm_nt(in, v + l.weight_offset, v + l.bias_offset, out, rows, l.out, l.in);
}

// grads for one dense layer given dL/dout (rows x out) and its input.
void dense_backward(const simd::Kernels& k, const LifterParams& p, const DenseLayer& l, const double* in,
                    const double* dout, std::size_t rows, double* grads, double* din) {
  k.gemm_tn_acc(dout, in, grads + l.weight_offset, rows, l.out, l.in);
  double* gb = grads + l.bias_offset;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* d = dout + r * l.out;
    for (int j = 0; j < l.out; ++j) gb[j] += d[j];
  }
  if (din) k.gemm_nn_acc(dout, p.values().data() + l.weight_offset, din, rows, l.out, l.in);
}

double frob(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double spectral_norm(const double* w, int out, int in, int iterations) {
  std::vector<double> x(in), y(out);
  for (int i = 0; i < in; ++i) x[i] = 1.0 + 0.01 * (i % 7);
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nx = frob(x.data(), in);
    if (!(nx > 0.0)) return 0.0;
    for (double& e : x) e /= nx;
    for (int r = 0; r < out; ++r) {
      double s = 0.0;
      for (int c = 0; c < in; ++c) s += w[std::size_t(r) * in + c] * x[c];
      y[r] = s;
    }
    sigma = frob(y.data(), out);
    std::fill(x.begin(), x.end(), 0.0);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) x[c] += w[std::size_t(r) * in + c] * y[r];
  }
  return sigma;
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kRelu: return "relu";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "relu") return Activation::kRelu;
  throw Error(ErrorCode::kConfig, "unknown activation '" + name + "' (expected leaky_relu or relu)");
}

LifterParams::LifterParams(int joints, int width, Activation activation)
    : joints_(joints), width_(width), activation_(activation) {
  if (joints < 2 || width < 1) throw Error(ErrorCode::kShapeMismatch, "lifter needs >= 2 joints and width >= 1");
  std::size_t off = 0;
  auto add = [&](int in, int out) {
    DenseLayer l{off, off + std::size_t(in) * out, in, out};
    off = l.bias_offset + out;
    layers_.push_back(l);
  };
  add(2 * joints, width);
  for (int b = 0; b < 2 * kResidualBlocks; ++b) add(width, width);
  add(width, 3 * joints);
  values_.assign(off, 0.0);
}

LifterParams LifterParams::initialize(int joints, int width, Rng& rng, Activation activation) {
  LifterParams p(joints, width, activation);
  for (const DenseLayer& l : p.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < std::size_t(l.in) * l.out; ++i) p.values_[l.weight_offset + i] = u(rng);
  }
  return p;
}

std::vector<double> forward_batch(const LifterParams& params, std::span<const double> x, std::size_t rows,
                                  ForwardCache* cache) {
  const int j = params.joints();
  const int w = params.width();
  if (x.size() != rows * 2 * std::size_t(j))
    throw Error(ErrorCode::kShapeMismatch, "forward: input is not rows x 2J");
  const simd::Kernels& k = simd::active_kernels();
  const Activation a = params.activation();
  const auto& layers = params.layers();
  const std::size_t hw = rows * w;

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.rows = rows;
  c.input.assign(x.begin(), x.end());
  c.z0.resize(hw);
  c.h.assign(kResidualBlocks + 1, std::vector<double>(hw));
  c.u.assign(kResidualBlocks, std::vector<double>(hw));
  c.v.assign(kResidualBlocks, std::vector<double>(hw));
  c.w.assign(kResidualBlocks, std::vector<double>(hw));

  dense(k, params, layers[0], x.data(), rows, c.z0.data());
  for (std::size_t i = 0; i < hw; ++i) c.h[0][i] = act(a, c.z0[i]);
  for (int b = 0; b < kResidualBlocks; ++b) {
    dense(k, params, layers[1 + 2 * b], c.h[b].data(), rows, c.u[b].data());
    for (std::size_t i = 0; i < hw; ++i) c.v[b][i] = act(a, c.u[b][i]);
    dense(k, params, layers[2 + 2 * b], c.v[b].data(), rows, c.w[b].data());
    for (std::size_t i = 0; i < hw; ++i) c.h[b + 1][i] = c.h[b][i] + act(a, c.w[b][i]);
  }
  c.out.resize(rows * 3 * j);
  dense(k, params, layers.back(), c.h[kResidualBlocks].data(), rows, c.out.data());

  std::vector<double> y(c.out);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = y.data() + r * 3 * j;
    const double r0 = row[0], r1 = row[1], r2 = row[2];
    for (int q = 0; q < j; ++q) {
      row[3 * q] -= r0;
      row[3 * q + 1] -= r1;
      row[3 * q + 2] -= r2;
    }
  }
  return y;
}

Pose3D forward(const LifterParams& params, const Pose2D& normalized_input) {
  if (static_cast<int>(normalized_input.size()) != params.joints())
    throw Error(ErrorCode::kShapeMismatch, "forward: pose has " + std::to_string(normalized_input.size()) +
                                               " joints, network expects " + std::to_string(params.joints()));
  const auto x = flatten(normalized_input);
  const auto y = forward_batch(params, x, 1);
  Pose3D out;
  out.joints.resize(params.joints());
  for (int q = 0; q < params.joints(); ++q) out.joints[q] = {y[3 * q], y[3 * q + 1], y[3 * q + 2]};
  return out;
}

double loss3d(const Pose3D& prediction, const Pose3D& target) {
  if (prediction.size() != target.size()) throw Error(ErrorCode::kShapeMismatch, "loss3d: joint counts differ");
  const double np = frobenius_norm(prediction), nt = frobenius_norm(target);
  if (!(np > 1e-12) || !(nt > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "loss3d: zero-norm pose");
  double s = 0.0;
  for (std::size_t q = 0; q < prediction.size(); ++q)
    for (int d = 0; d < 3; ++d) s += std::abs(prediction.joints[q][d] / np - target.joints[q][d] / nt);
  return s;
}

double loss3d(std::span<const Pose3D> predictions, std::span<const Pose3D> targets) {
  if (predictions.size() != targets.size() || predictions.empty())
    throw Error(ErrorCode::kShapeMismatch, "loss3d: need one target per view");
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) s += loss3d(predictions[i], targets[i]);
  return s / static_cast<double>(predictions.size());
}

double loss2d(std::span<const Pose3D> predictions, std::span<const Pose2D> targets,
              std::span<const Rotation> rotations) {
  const std::size_t n = predictions.size();
  if (n == 0 || targets.size() != n || rotations.size() != n)
    throw Error(ErrorCode::kShapeMismatch, "loss2d: need matching predictions, targets and rotations");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Mat3 m = rotations[j].m * transpose(rotations[i].m);
      const Pose2D p = project(rotate(m, predictions[i]));
      const Pose2D& t = targets[j];
      if (t.size() != p.size()) throw Error(ErrorCode::kShapeMismatch, "loss2d: joint counts differ");
      const double nt = frobenius_norm(t);
      if (!(nt > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "loss2d: zero-norm target");
      for (std::size_t q = 0; q < p.size(); ++q)
        for (int d = 0; d < 2; ++d) s += std::abs(p.joints[q][d] - t.joints[q][d] / nt);
    }
  }
  return s / static_cast<double>(n * n);
}

MultiViewBatch make_batch(std::span<const Pose3D> poses, std::span<const Rotation> rotations) {
  if (poses.empty() || rotations.empty()) throw Error(ErrorCode::kEmptyInput, "make_batch: empty batch");
  MultiViewBatch b;
  b.batch = static_cast<int>(poses.size());
  b.views = static_cast<int>(rotations.size());
  b.joints = static_cast<int>(poses[0].size());
  for (const Rotation& r : rotations) b.rotations.push_back(r.m);
  b.inputs.reserve(b.rows() * 2 * b.joints);
  b.targets3d.reserve(b.rows() * 3 * b.joints);
  for (const Pose3D& p : poses) {
    if (static_cast<int>(p.size()) != b.joints) throw Error(ErrorCode::kShapeMismatch, "make_batch: joint counts differ");
    for (const Rotation& r : rotations) {
      const Pose3D rp = rotate(r.m, p);
      const auto f2 = flatten(project(rp));
      const auto f3 = flatten(rp);
      b.inputs.insert(b.inputs.end(), f2.begin(), f2.end());
      b.targets3d.insert(b.targets3d.end(), f3.begin(), f3.end());
    }
  }
  return b;
}

namespace {

LossBreakdown compute(const LifterParams& params, const MultiViewBatch& batch, double lambda3d,
                      std::vector<double>* grads) {
  const int j = params.joints();
  if (batch.joints != j) throw Error(ErrorCode::kShapeMismatch, "batch joint count differs from the network");
  const std::size_t rows = batch.rows();
  const int nv = batch.views;
  const std::size_t d3 = 3 * std::size_t(j), d2 = 2 * std::size_t(j);

  ForwardCache cache;
  const std::vector<double> y = forward_batch(params, batch.inputs, rows, grads ? &cache : nullptr);

  LossBreakdown out;
  out.joint_l3d.assign(j, 0.0);
  const double w3 = 1.0 / (static_cast<double>(nv) * batch.batch);
  const double w2 = 1.0 / (static_cast<double>(nv) * nv * batch.batch);
  std::vector<double> gy(grads ? rows * d3 : 0, 0.0);
  std::vector<double> gn(d3), yn(d3), gp(d2), p(d2);

  for (int s = 0; s < batch.batch; ++s) {
    for (int i = 0; i < nv; ++i) {
      const std::size_t r = std::size_t(s) * nv + i;
      const double* yr = y.data() + r * d3;
      const double* tr = batch.targets3d.data() + r * d3;
      const double ny = frob(yr, d3), nt = frob(tr, d3);
      if (!(ny > 1e-12) || !(nt > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "zero-norm 3D pose in loss");
      double* g = grads ? gy.data() + r * d3 : nullptr;

      double dotg = 0.0;
      for (std::size_t e = 0; e < d3; ++e) {
        yn[e] = yr[e] / ny;
        const double diff = yn[e] - tr[e] / nt;
        out.l3d += std::abs(diff) * w3;
        out.joint_l3d[e / 3] += std::abs(diff) * w3;
        gn[e] = lambda3d * w3 * sign(diff);
        dotg += yn[e] * gn[e];
      }
      if (g)
        for (std::size_t e = 0; e < d3; ++e) g[e] += (gn[e] - yn[e] * dotg) / ny;

      for (int v = 0; v < nv; ++v) {
        const Mat3 m = batch.rotations[v] * transpose(batch.rotations[i]);
        for (int q = 0; q < j; ++q) {
          const double* a = yr + 3 * q;
          p[2 * q] = m[0][0] * a[0] + m[0][1] * a[1] + m[0][2] * a[2];
          p[2 * q + 1] = m[1][0] * a[0] + m[1][1] * a[1] + m[1][2] * a[2];
        }
        const double nz = frob(p.data(), d2);
        if (!(nz > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "prediction projects to a point");
        const double* xt = batch.inputs.data() + (std::size_t(s) * nv + v) * d2;
        const double nx = frob(xt, d2);
        if (!(nx > 1e-12)) throw Error(ErrorCode::kDegeneratePose, "zero-norm 2D target");
        double dotp = 0.0;
        for (std::size_t e = 0; e < d2; ++e) {
          p[e] /= nz;
          const double diff = p[e] - xt[e] / nx;
          out.l2d += std::abs(diff) * w2;
          gp[e] = w2 * sign(diff);
          dotp += p[e] * gp[e];
        }
        if (g) {
          for (int q = 0; q < j; ++q) {
            const double dx = (gp[2 * q] - p[2 * q] * dotp) / nz;
            const double dy = (gp[2 * q + 1] - p[2 * q + 1] * dotp) / nz;
            for (int c = 0; c < 3; ++c) g[3 * q + c] += m[0][c] * dx + m[1][c] * dy;
          }
        }
      }
    }
  }
  out.total = total_loss(out.l2d, out.l3d, lambda3d);
  if (!grads) return out;

  // Root centring: y_q = o_q - o_0.
  const std::size_t hw = rows * params.width();
  std::vector<double> go(rows * d3);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* g = gy.data() + r * d3;
    double* o = go.data() + r * d3;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int q = 1; q < j; ++q) {
      o[3 * q] = g[3 * q];
      o[3 * q + 1] = g[3 * q + 1];
      o[3 * q + 2] = g[3 * q + 2];
      sx += g[3 * q];
      sy += g[3 * q + 1];
      sz += g[3 * q + 2];
    }
    o[0] = -sx;
    o[1] = -sy;
    o[2] = -sz;
  }

  const simd::Kernels& k = simd::active_kernels();
  const Activation a = params.activation();
  const auto& layers = params.layers();
  grads->assign(params.size(), 0.0);
  double* gr = grads->data();

  std::vector<double> dh(hw, 0.0), dw(hw), dv(hw), du(hw);
  dense_backward(k, params, layers.back(), cache.h[kResidualBlocks].data(), go.data(), rows, gr, dh.data());
  for (int b = kResidualBlocks - 1; b >= 0; --b) {
    for (std::size_t e = 0; e < hw; ++e) dw[e] = dh[e] * act_grad(a, cache.w[b][e]);
    std::fill(dv.begin(), dv.end(), 0.0);
    dense_backward(k, params, layers[2 + 2 * b], cache.v[b].data(), dw.data(), rows, gr, dv.data());
    for (std::size_t e = 0; e < hw; ++e) du[e] = dv[e] * act_grad(a, cache.u[b][e]);
    // dh already holds the skip path; add the branch.
    dense_backward(k, params, layers[1 + 2 * b], cache.h[b].data(), du.data(), rows, gr, dh.data());
  }
  for (std::size_t e = 0; e < hw; ++e) dh[e] *= act_grad(a, cache.z0[e]);
  dense_backward(k, params, layers[0], cache.input.data(), dh.data(), rows, gr, nullptr);

  for (double g : *grads)
    if (!std::isfinite(g)) throw Error(ErrorCode::kNonFiniteGradient, "non-finite gradient");
  return out;
}

}  // namespace

LossBreakdown evaluate_loss(const LifterParams& params, const MultiViewBatch& batch, double lambda3d) {
  return compute(params, batch, lambda3d, nullptr);
}

LossBreakdown backward(const LifterParams& params, const MultiViewBatch& batch, double lambda3d,
                       std::vector<double>& grads) {
  return compute(params, batch, lambda3d, &grads);
}

double lipschitz_bound(const LifterParams& params, int iterations) {
  const auto& layers = params.layers();
  const double* v = params.values().data();
  auto norm = [&](const DenseLayer& l) { return spectral_norm(v + l.weight_offset, l.out, l.in, iterations); };
  double bound = norm(layers[0]);
  for (int b = 0; b < kResidualBlocks; ++b) bound *= 1.0 + norm(layers[1 + 2 * b]) * norm(layers[2 + 2 * b]);
  bound *= norm(layers.back());
  // x_q - x_0 over J joints has operator norm sqrt(J).
  return bound * std::sqrt(static_cast<double>(params.joints()));
}

void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state, double lr) {
  if (grads.size() != params.size()) throw Error(ErrorCode::kShapeMismatch, "adam_step: gradient size mismatch");
  if (state.m.size() != params.size()) state.m.assign(params.size(), 0.0);
  if (state.v.size() != params.size()) state.v.assign(params.size(), 0.0);
  ++state.step;
  const double t = static_cast<double>(state.step);
  const simd::AdamCoefficients c{lr, state.beta1, state.beta2, state.eps,
                                 1.0 - std::pow(state.beta1, t), 1.0 - std::pow(state.beta2, t)};
  simd::active_kernels().adam_update(params.data(), grads.data(), state.m.data(), state.v.data(), params.size(), c);
}

void adam_step(LifterParams& params, std::span<const double> grads, OptimizerState& state, double lr) {
  adam_step(std::span<double>(params.values()), grads, state, lr);
}

}  // namespace synthpose
