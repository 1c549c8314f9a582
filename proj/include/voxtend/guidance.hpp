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
#include <string_view>

#include "voxtend/diffusion.hpp"
#include "voxtend/embedding.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/rng.hpp"

namespace voxtend {

enum class GuidanceMode { kExternal, kBuiltin };

GuidanceMode parse_guidance_mode(std::string_view name);
std::string_view to_string(GuidanceMode mode);

/// Default guidance scales: 2.0 for the external (gradient) path and 3.0 for
/// the built-in (classifier-free) path.
double default_scale(GuidanceMode mode);

/// Receives one "t=<int> sim=<decimal>" line per reverse step.
using TraceSink = std::function<void(std::string_view)>;

struct GuidanceConfig {
  GuidanceMode mode = GuidanceMode::kBuiltin;
  double scale = 3.0;
  std::size_t target_frames = 8;
  TraceSink trace;  // empty = tracing off

  void validate() const;
};

/// (1 - s) * eps_uncond + s * eps_cond, i.e. eps_uncond + s (eps_cond -
/// eps_uncond) written so that s = 0 and s = 1 reproduce the inputs exactly.
FeatureMap cfg_mix(const FeatureMap& eps_uncond, const FeatureMap& eps_cond,
                   double s);

/// mu + s * sigma * grad.
FeatureMap guided_mean_external(const FeatureMap& mu, double sigma,
                                const FeatureMap& grad, double s);

/// f_phi(xt) . e
double similarity_check(const FeatureMap& xt, const SpeakerEmbedding& e,
                        const DifferentiableEmbedder& embedder);

/// Ancestral sampling with a single estimator branch: unconditional when
/// `condition` is null, purely conditional otherwise.
FeatureMap sample_plain(const NoiseEstimator& estimator,
                        const NoiseSchedule& sched, std::size_t frames,
                        DiffusionSeed& seed,
                        const SpeakerEmbedding* condition = nullptr);

/// Gradient-guided sampling: the unconditional estimator's mean is shifted by
/// s * sigma_t * grad_x (f_phi(x_t) . e) at every step.
FeatureMap sample_external(const SpeakerEmbedding& e, const GuidanceConfig& cfg,
                           const NoiseEstimator& estimator,
                           const DifferentiableEmbedder& embedder,
                           const NoiseSchedule& sched, DiffusionSeed& seed);

/// Classifier-free sampling mixing conditional and unconditional estimates.
/// `tracer` is optional and only used when cfg.trace is set.
FeatureMap sample_builtin(const SpeakerEmbedding& e, const GuidanceConfig& cfg,
                          const NoiseEstimator& estimator,
                          const NoiseSchedule& sched, DiffusionSeed& seed,
                          const DifferentiableEmbedder* tracer = nullptr);

}  // namespace voxtend
