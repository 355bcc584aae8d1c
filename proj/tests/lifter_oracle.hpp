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

#include <cmath>
#include <vector>

#include "synthpose/camera.hpp"
#include "synthpose/lifter.hpp"

namespace synthpose::oracle {

// Independent re-implementation of the network and the batch loss. With a
// recorded pattern it can also evaluate the loss with every kink (activation
// side and l1 sign) frozen, which is smooth in the parameters.
struct Pattern {
  std::vector<int> act;  // 1 = positive side
  std::vector<double> sign;
};

// Extended precision keeps the oracle's own rounding well below the
// finite-difference signal at h = 1e-5.
using Real = long double;

inline Real oracle_act(Real z, bool leaky, int* rec, const int* frozen) {
  const bool pos = frozen ? *frozen == 1 : z > 0.0L;
  if (rec) *rec = z > 0.0L;
  return pos ? z : (leaky ? Real(kLeakySlope) * z : 0.0L);
}

inline Real oracle_sign(Real d, double* rec, const double* frozen) {
  const double sg = (d > 0) - (d < 0);
  const Real s = frozen ? *frozen : sg;
  if (rec) *rec = sg;
  return s;
}

inline std::vector<Real> oracle_forward(const LifterParams& p, const std::vector<double>& vals, const double* x,
                                        Pattern* rec, const Pattern* frozen, std::size_t& ai) {
  const auto& L = p.layers();
  const bool leaky = p.activation() == Activation::kLeakyRelu;
  auto dense = [&](const DenseLayer& l, const std::vector<Real>& in) {
    std::vector<Real> out(l.out);
    for (int o = 0; o < l.out; ++o) {
      Real s = vals[l.bias_offset + o];
      for (int i = 0; i < l.in; ++i) s += Real(vals[l.weight_offset + std::size_t(o) * l.in + i]) * in[i];
      out[o] = s;
    }
    return out;
  };
  auto activate = [&](std::vector<Real> z) {
    for (Real& e : z) {
      int r = 0;
      e = oracle_act(e, leaky, rec ? &r : nullptr, frozen ? &frozen->act[ai] : nullptr);
      if (rec) rec->act.push_back(r);
      ++ai;
    }
    return z;
  };
  std::vector<Real> in(x, x + 2 * p.joints());
  std::vector<Real> h = activate(dense(L[0], in));
  for (int b = 0; b < kResidualBlocks; ++b) {
    const std::vector<Real> v = activate(dense(L[1 + 2 * b], h));
    const std::vector<Real> w = activate(dense(L[2 + 2 * b], v));
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += w[i];
  }
  std::vector<Real> o = dense(L.back(), h);
  const Real r0 = o[0], r1 = o[1], r2 = o[2];
  for (int q = 0; q < p.joints(); ++q) o[3 * q] -= r0, o[3 * q + 1] -= r1, o[3 * q + 2] -= r2;
  return o;
}

inline Real oracle_loss(const LifterParams& p, const std::vector<double>& vals, const MultiViewBatch& b, double lambda,
                        Pattern* rec, const Pattern* frozen, double* l2d_out = nullptr, double* l3d_out = nullptr) {
  const int J = p.joints(), N = b.views;
  std::size_t ai = 0, si = 0;
  Real l2 = 0, l3 = 0;
  auto take_sign = [&](Real d) {
    double r = 0;
    const Real s = oracle_sign(d, rec ? &r : nullptr, frozen ? &frozen->sign[si] : nullptr);
    if (rec) rec->sign.push_back(r);
    ++si;
    return s * d;
  };
  for (int s = 0; s < b.batch; ++s)
    for (int i = 0; i < N; ++i) {
      const std::size_t r = std::size_t(s) * N + i;
      const auto y = oracle_forward(p, vals, b.inputs.data() + r * 2 * J, rec, frozen, ai);
      const double* t = b.targets3d.data() + r * 3 * J;
      Real ny = 0, nt = 0;
      for (int e = 0; e < 3 * J; ++e) ny += y[e] * y[e], nt += Real(t[e]) * t[e];
      ny = std::sqrt(ny), nt = std::sqrt(nt);
      for (int e = 0; e < 3 * J; ++e) l3 += take_sign(y[e] / ny - t[e] / nt) / Real(N * b.batch);
      for (int v = 0; v < N; ++v) {
        const Mat3 m = b.rotations[v] * transpose(b.rotations[i]);
        std::vector<Real> q(2 * J);
        Real nq = 0, nx = 0;
        for (int k = 0; k < J; ++k)
          for (int row = 0; row < 2; ++row)
            q[2 * k + row] = Real(m[row][0]) * y[3 * k] + Real(m[row][1]) * y[3 * k + 1] + Real(m[row][2]) * y[3 * k + 2];
        const double* xt = b.inputs.data() + (std::size_t(s) * N + v) * 2 * J;
        for (int e = 0; e < 2 * J; ++e) nq += q[e] * q[e], nx += Real(xt[e]) * xt[e];
        nq = std::sqrt(nq), nx = std::sqrt(nx);
        for (int e = 0; e < 2 * J; ++e) l2 += take_sign(q[e] / nq - xt[e] / nx) / (Real(N) * N * b.batch);
      }
    }
  if (l2d_out) *l2d_out = static_cast<double>(l2);
  if (l3d_out) *l3d_out = static_cast<double>(l3);
  return l2 + Real(lambda) * l3;
}

}  // namespace synthpose::oracle
