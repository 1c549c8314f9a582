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
#include <string>
#include <string_view>
#include <vector>

#include "voxtend/feature_map.hpp"
#include "voxtend/rng.hpp"

namespace voxtend {

enum class ScheduleKind { kLinear, kCosine };

/// Which fixed reverse-process variance sigma_t returns.
enum class VarianceKind {
  kPosterior,  // beta_tilde_t = (1 - abar_{t-1}) / (1 - abar_t) * beta_t
  kBeta,       // beta_t
};

ScheduleKind parse_schedule_kind(std::string_view name);
std::string_view to_string(ScheduleKind kind);

/// Per-step noise magnitudes beta_t, alpha_t = 1 - beta_t and the running
/// product abar_t. Step indices are 1-based throughout: t in [1, steps()].
class NoiseSchedule {
 public:
  /// Validated constructor: 0 < beta < 1 for every step.
  static NoiseSchedule from_betas(std::vector<double> betas,
                                  VarianceKind variance = VarianceKind::kPosterior);

  /// Unvalidated constructor for injecting edge schedules (alpha_t = 1,
  /// abar_t ~ 0) in tests. beta is set to 1 - alpha.
  static NoiseSchedule from_raw(std::vector<double> alpha,
                                std::vector<double> alpha_bar,
                                VarianceKind variance = VarianceKind::kPosterior);

  std::size_t steps() const noexcept { return beta_.size(); }
  double beta(std::size_t t) const { return beta_[index(t)]; }
  double alpha(std::size_t t) const { return alpha_[index(t)]; }
  double alpha_bar(std::size_t t) const { return alpha_bar_[index(t)]; }
  const std::vector<double>& betas() const noexcept { return beta_; }

  VarianceKind variance() const noexcept { return variance_; }
  NoiseSchedule with_variance(VarianceKind variance) const;

  /// Throws kInvalidArgument unless 1 <= t <= steps().
  void check_step(std::size_t t) const;

 private:
  std::size_t index(std::size_t t) const {
    check_step(t);
    return t - 1;
  }

  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
  VarianceKind variance_ = VarianceKind::kPosterior;
};

/// Linear: beta interpolated from 1e-4 to 2e-2 inclusive. Cosine: the
/// squared-cosine abar curve with offset 0.008, betas capped at 0.999.
NoiseSchedule build_schedule(ScheduleKind kind, std::size_t steps);
NoiseSchedule build_schedule(std::string_view kind, std::size_t steps);

/// One forward noising step: sqrt(alpha_t) x + sqrt(1 - alpha_t) eps.
FeatureMap forward_step(const FeatureMap& x_prev, std::size_t t,
                        const NoiseSchedule& sched, DiffusionSeed& seed);

struct NoisedSample {
  FeatureMap xt;
  FeatureMap eps;
};

/// Closed-form jump x0 -> x_t. Returns the noise actually drawn.
NoisedSample forward_jump(const FeatureMap& x0, std::size_t t,
                          const NoiseSchedule& sched, DiffusionSeed& seed);

/// Reverse-process mean recovered from a noise estimate.
FeatureMap mu_from_eps(const FeatureMap& xt, const FeatureMap& eps_hat,
                       std::size_t t, const NoiseSchedule& sched);

/// Fixed reverse-process variance at step t (never negative).
double sigma_t(std::size_t t, const NoiseSchedule& sched);

/// Draws x_{t-1} ~ N(mu, sigma_t I); at t = 1 returns mu without drawing.
FeatureMap reverse_step(const FeatureMap& xt, const FeatureMap& mu,
                        std::size_t t, const NoiseSchedule& sched,
                        DiffusionSeed& seed);

/// Mean squared elementwise difference.
double l_simple(const FeatureMap& eps, const FeatureMap& eps_hat);

/// Fills a map with i.i.d. standard normal draws.
FeatureMap standard_normal(std::size_t frames, std::size_t bins,
                           DiffusionSeed& seed);

// "voxtend-schedule v1" text format.
std::string serialize_schedule(const NoiseSchedule& sched);
NoiseSchedule parse_schedule(std::string_view text);

}  // namespace voxtend
