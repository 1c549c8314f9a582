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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "voxtend/diffusion.hpp"
#include "voxtend/embedding.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/rng.hpp"

namespace voxtend {

/// epsilon_theta(x_t, t) and, for conditional estimators, epsilon_theta(x_t|e).
/// Implementations must be safe for concurrent const use.
class NoiseEstimator {
 public:
  virtual ~NoiseEstimator() = default;

  virtual std::size_t frames() const = 0;
  virtual std::size_t bins() const = 0;
  virtual bool conditional() const { return false; }
  virtual std::size_t condition_dim() const { return 0; }

  /// `condition` == nullptr selects the unconditional branch.
  virtual FeatureMap predict(const FeatureMap& xt, std::size_t t,
                             const SpeakerEmbedding* condition) const = 0;
};

/// Exact minimum-MSE noise estimate when x0 ~ N(mean0, var0 I).
class AnalyticGaussianEstimator final : public NoiseEstimator {
 public:
  AnalyticGaussianEstimator(FeatureMap mean0, double var0, NoiseSchedule sched);

  std::size_t frames() const override { return mean0_.frames(); }
  std::size_t bins() const override { return mean0_.bins(); }
  FeatureMap predict(const FeatureMap& xt, std::size_t t,
                     const SpeakerEmbedding* condition) const override;

  const FeatureMap& mean0() const noexcept { return mean0_; }
  double var0() const noexcept { return var0_; }

 private:
  FeatureMap mean0_;
  double var0_;
  NoiseSchedule sched_;
};

FeatureMap analytic_eps(const FeatureMap& xt, std::size_t t,
                        const AnalyticGaussianEstimator& est);

struct SmallNetShape {
  static constexpr std::size_t kTimeDim = 16;

  std::size_t frames = 8;
  std::size_t bins = 8;
  std::size_t hidden = 64;
  std::size_t cond_dim = 8;
  std::size_t steps = 200;

  std::size_t input_dim() const { return frames * bins; }
  friend bool operator==(const SmallNetShape&, const SmallNetShape&) = default;
};

/// Parameter tensors of SmallNetEstimator, also used for their gradients.
/// Vectors are stored as n x 1 matrices.
struct NetTensors {
  enum Index : std::size_t {
    kInW,
    kInB,
    kTimeW,
    kCondW,
    kNullToken,
    kMidW,
    kMidB,
    kOutW,
    kOutB,
    kCount,
  };
  static constexpr std::array<std::string_view, kCount> kNames = {
      "in.weight",  "in.bias",    "time.weight", "cond.weight", "null_token",
      "mid.weight", "mid.bias",   "out.weight",  "out.bias"};

  std::array<Eigen::MatrixXd, kCount> tensors;

  Eigen::MatrixXd& operator[](std::size_t i) { return tensors[i]; }
  const Eigen::MatrixXd& operator[](std::size_t i) const { return tensors[i]; }

  static NetTensors zeros_like(const NetTensors& other);
  bool all_finite() const;
};

/// Two-hidden-layer SiLU MLP over the flattened feature map.
///
///   h1  = silu(W_in x + b_in + W_time tau(t) + c)
///   h2  = silu(W_mid h1 + b_mid)
///   eps = W_out h2 + b_out
///
/// tau(t) is a fixed sinusoidal table of width 16. The condition term c is
/// W_cond e for a speaker embedding and the learned null token otherwise, so
/// the unconditional branch never touches W_cond.
class SmallNetEstimator final : public NoiseEstimator {
 public:
  SmallNetEstimator(SmallNetShape shape, NetTensors params);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static SmallNetEstimator initialize(const SmallNetShape& shape,
                                      DiffusionSeed& seed);
  static SmallNetEstimator zeros(const SmallNetShape& shape);

  std::size_t frames() const override { return shape_.frames; }
  std::size_t bins() const override { return shape_.bins; }
  bool conditional() const override { return true; }
  std::size_t condition_dim() const override { return shape_.cond_dim; }
  FeatureMap predict(const FeatureMap& xt, std::size_t t,
                     const SpeakerEmbedding* condition) const override;

  const SmallNetShape& shape() const noexcept { return shape_; }
  const NetTensors& params() const noexcept { return params_; }
  NetTensors& mutable_params() noexcept { return params_; }

  /// Sinusoidal timestep embedding for step t (1-based).
  Eigen::VectorXd time_embedding(std::size_t t) const;

 private:
  void check_input(const FeatureMap& xt, std::size_t t,
                   const SpeakerEmbedding* condition) const;

  SmallNetShape shape_;
  NetTensors params_;
  Eigen::MatrixXd time_table_;  // kTimeDim x steps
};

FeatureMap net_forward(const FeatureMap& xt, std::size_t t,
                       const SpeakerEmbedding* e, const SmallNetEstimator& net);

struct TrainItem {
  FeatureMap x0;
  std::size_t t = 1;
  std::optional<SpeakerEmbedding> condition;  // nullopt = null token
};

struct NetGradient {
  double loss = 0.0;
  NetTensors grads;
};

/// Noises every item with forward_jump, evaluates l_simple over the whole
/// batch and back-propagates exactly. `seed` is taken by value so the same
/// noise can be replayed (finite-difference checks).
NetGradient net_grad(const std::vector<TrainItem>& batch,
                     const SmallNetEstimator& net, const NoiseSchedule& sched,
                     DiffusionSeed seed);

/// Same loss without the backward pass.
double net_loss(const std::vector<TrainItem>& batch,
                const SmallNetEstimator& net, const NoiseSchedule& sched,
                DiffusionSeed seed);

}  // namespace voxtend
