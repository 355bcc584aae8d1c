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

#include "synthpose/train.hpp"

#include <numeric>

#include "json.hpp"
#include "synthpose/error.hpp"

namespace synthpose {

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, m); };
  if (batch_size < 1) fail("batch_size must be positive");
  if (epochs < 1) fail("epochs must be positive");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be non-negative");
  if (views < 1) fail("views must be >= 1");
  if (!(lambda3d >= 0.0)) fail("lambda3d must be non-negative");
  if (samples_per_epoch < 1) fail("samples_per_epoch must be positive");
  if (width < 1) fail("width must be positive");
  if (!(diffusion_base >= 0.0 && diffusion_base < 0.25)) fail("diffusion_base must lie in [0, 0.25)");
}

std::string to_json_line(const BatchLog& log) {
  nlohmann::ordered_json j;
  j["batch"] = log.batch;
  j["epoch"] = log.epoch;
  j["l2d"] = log.l2d;
  j["l3d"] = log.l3d;
  j["total"] = log.total;
  j["alpha_mean"] = log.alpha_mean;
  j["sigma_view"] = {{"azimuth", log.sigma_azimuth}, {"tilt", log.sigma_tilt}};
  j["t"] = log.diffusion_step;
  return j.dump();
}

TrainResult train(const TrainConfig& config, DistributionSet& dist, const BatchCallback& on_batch) {
  config.validate();
  Rng init(config.seed);
  LifterParams params =
      LifterParams::initialize(dist.layout().joint_count(), config.width, init, config.activation);
  return train(config, dist, std::move(params), OptimizerState{}, on_batch);
}

TrainResult train(const TrainConfig& config, DistributionSet& dist, LifterParams params, OptimizerState optimizer,
                  const BatchCallback& on_batch) {
  config.validate();
  if (params.joints() != dist.layout().joint_count())
    throw Error(ErrorCode::kShapeMismatch, "network joint count differs from the layout");
  // Separate stream from the initialiser; offset by the optimiser step so a
  // resumed run does not replay the same batches.
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(optimizer.step));
  EmpiricalTracker tracker(dist);
  DiffusionSchedule schedule{config.diffusion_base, config.views, {}};

  TrainResult result;
  std::vector<double> grads;
  std::vector<Pose3D> poses;
  std::vector<Rotation> rotations;
  long global = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_sum = 0.0;
    long epoch_batches = 0;
    const long nb = config.batches_per_epoch();
    for (long b = 1; b <= nb; ++b) {
      const long remaining = config.samples_per_epoch - (b - 1) * config.batch_size;
      const int size = static_cast<int>(std::min<long>(config.batch_size, remaining));
      poses.clear();
      for (int s = 0; s < size; ++s) poses.push_back(generate(dist, tracker, rng).pose);
      const ViewSigma sigma = view_sigma(config.view_schedule, b);
      rotations.clear();
      for (int v = 0; v < config.views; ++v) rotations.push_back(sample_rotation(sigma.azimuth, sigma.tilt, rng));

      const MultiViewBatch batch = make_batch(poses, rotations);
      const LossBreakdown loss = backward(params, batch, config.lambda3d, grads);
      adam_step(params, grads, optimizer, config.learning_rate);

      BatchLog log;
      log.batch = ++global;
      log.epoch = epoch;
      log.l2d = loss.l2d;
      log.l3d = loss.l3d;
      log.total = loss.total;
      log.sigma_azimuth = sigma.azimuth;
      log.sigma_tilt = sigma.tilt;
      if (config.diffusion) {
        const std::vector<double> alpha = next_diffusion_alpha(schedule, loss.joint_l3d);
        diffuse(dist, alpha);
        log.alpha_mean = std::accumulate(alpha.begin(), alpha.end(), 0.0) / static_cast<double>(alpha.size());
      }
      log.diffusion_step = dist.step();
      epoch_sum += loss.total;
      ++epoch_batches;
      result.log.push_back(log);
      if (on_batch) on_batch(log);
    }
    result.epoch_mean_total.push_back(epoch_sum / static_cast<double>(epoch_batches));
  }
  result.params = std::move(params);
  result.optimizer = std::move(optimizer);
  return result;
}

}  // namespace synthpose
