// Copyright 2026 The voxtend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxtend/training.hpp"

#include <cmath>
#include <numeric>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

void validate(const ToyDataset& dataset, const SmallNetEstimator& net,
              const TrainConfig& config, const NoiseSchedule& sched) {
  require(config.steps >= 1 && config.batch >= 1, ErrorCode::kConfiguration,
          "training needs at least one step and one item per batch");
  require(config.learning_rate > 0.0 && std::isfinite(config.learning_rate),
          ErrorCode::kConfiguration, "learning rate must be positive");
  require(config.p_uncond >= 0.0 && config.p_uncond <= 1.0,
          ErrorCode::kConfiguration, "p_uncond must lie in [0, 1]");
  const auto& shape = net.shape();
  const auto& spec = dataset.world().spec();
  require(shape.frames == spec.frames && shape.bins == spec.bins,
          ErrorCode::kConfiguration, "net size does not match the toy world");
  require(dataset.reference(0).dim() == shape.cond_dim,
          ErrorCode::kConfiguration,
          "embedding dimension does not match the net's condition width");
  require(shape.steps == sched.steps(), ErrorCode::kConfiguration,
          "net timestep table does not match the schedule length");
}

}  // namespace

TrainResult train_estimator(
    const ToyDataset& dataset, SmallNetEstimator net, const TrainConfig& config,
    const NoiseSchedule& sched, DiffusionSeed& seed,
    const std::function<void(std::size_t epoch, double loss)>& on_step) {
  validate(dataset, net, config, sched);
  TrainResult result{std::move(net), {}};
  result.losses.reserve(config.steps);
  std::vector<TrainItem> batch(config.batch);
  for (std::size_t epoch = 1; epoch <= config.steps; ++epoch) {
    for (auto& item : batch) {
      auto draw = dataset.draw(seed);
      item.x0 = std::move(draw.x0);
      item.t = 1 + static_cast<std::size_t>(seed.below(sched.steps()));
      if (seed.uniform() < config.p_uncond) {
        item.condition.reset();
      } else {
        item.condition = dataset.reference(draw.speaker);
      }
    }
    NetGradient g = net_grad(batch, result.net, sched, DiffusionSeed(seed.next()));
    if (!std::isfinite(g.loss) || !g.grads.all_finite()) {
      fail(ErrorCode::kTrainingDiverged,
           "training diverged at epoch " + std::to_string(epoch) +
               " (loss is not finite)");
    }
    result.losses.push_back(g.loss);
    if (on_step) on_step(epoch, g.loss);
    auto& params = result.net.mutable_params();
    for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
      params[i] -= config.learning_rate * g.grads[i];
    }
  }
  return result;
}

double smoothed_loss(const std::vector<double>& losses, std::size_t window,
                     bool from_end) {
  require(!losses.empty() && window >= 1, ErrorCode::kInvalidArgument,
          "smoothed_loss needs a non-empty curve");
  const std::size_t n = std::min(window, losses.size());
  auto first = from_end ? losses.end() - static_cast<std::ptrdiff_t>(n)
                        : losses.begin();
  return std::accumulate(first, first + static_cast<std::ptrdiff_t>(n), 0.0) /
         static_cast<double>(n);
}

}  // namespace voxtend
