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

// Synthetic training loop: generate a batch, view it from N cameras, take an
// optimiser step on the lifter, then diffuse the pose distribution with
// coefficients driven by the per-joint change of the 3D loss.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "synthpose/camera.hpp"
#include "synthpose/lifter.hpp"
#include "synthpose/posegen.hpp"

namespace synthpose {

struct TrainConfig {
  int batch_size = 32;
  int epochs = 10;
  double learning_rate = 1e-4;
  int views = 4;
  double lambda3d = 0.1;
  long samples_per_epoch = 1559752;  // Human3.6M training-set size
  std::uint64_t seed = 0;
  int width = 1024;
  Activation activation = Activation::kLeakyRelu;
  ViewSchedule view_schedule;
  double diffusion_base = 1e-5;
  bool diffusion = true;

  // Throws Error(kConfig) on non-positive sizes or views < 1.
  void validate() const;
  long batches_per_epoch() const { return (samples_per_epoch + batch_size - 1) / batch_size; }
};

struct BatchLog {
  long batch = 0;  // global, from 1
  int epoch = 0;   // from 1
  double l2d = 0.0;
  double l3d = 0.0;
  double total = 0.0;
  double alpha_mean = 0.0;
  double sigma_azimuth = 0.0;
  double sigma_tilt = 0.0;
  long diffusion_step = 0;
};

// One JSON object per line.
std::string to_json_line(const BatchLog& log);

struct TrainResult {
  LifterParams params;
  OptimizerState optimizer;
  std::vector<BatchLog> log;
  std::vector<double> epoch_mean_total;
};

using BatchCallback = std::function<void(const BatchLog&)>;

// `dist` is diffused in place. Bit-reproducible for a given config, layout
// and initial distribution (the config seed drives every random draw).
TrainResult train(const TrainConfig& config, DistributionSet& dist, const BatchCallback& on_batch = {});

// Resumes from existing weights and optimiser state.
TrainResult train(const TrainConfig& config, DistributionSet& dist, LifterParams params,
                  OptimizerState optimizer, const BatchCallback& on_batch = {});

}  // namespace synthpose
