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

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "voxtend/diffusion.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/rng.hpp"
#include "voxtend/toy_world.hpp"

namespace voxtend {

struct TrainConfig {
  std::size_t steps = 2000;
  std::size_t batch = 32;
  double learning_rate = 1e-3;
  double p_uncond = 0.1;  // conditional dropout
};

struct TrainResult {
  SmallNetEstimator net;
  std::vector<double> losses;  // one entry per gradient step
};

/// Plain gradient descent on l_simple. Every item draws a speaker, a step t
/// uniformly from [1, T] and, with probability p_uncond, swaps its reference
/// embedding for the null token. Throws kTrainingDiverged naming the epoch
/// (one epoch = one freshly drawn batch) when the loss stops being finite.
/// \p on_step, when set, sees every finite step loss as it is produced.
TrainResult train_estimator(
    const ToyDataset& dataset, SmallNetEstimator net, const TrainConfig& config,
    const NoiseSchedule& sched, DiffusionSeed& seed,
    const std::function<void(std::size_t epoch, double loss)>& on_step = {});

/// Mean of the first (`from_end` = false) or last `window` entries.
double smoothed_loss(const std::vector<double>& losses, std::size_t window,
                     bool from_end);

}  // namespace voxtend
