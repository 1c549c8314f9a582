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

#include "voxtend/guidance.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

void emit_trace(const TraceSink& sink, std::size_t t, double sim) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t=%zu sim=%.17g", t, sim);
  sink(buf);
}

void check_frames(const NoiseEstimator& estimator, const GuidanceConfig& cfg) {
  if (cfg.target_frames != estimator.frames()) {
    fail(ErrorCode::kConfiguration,
         "estimator generates " + std::to_string(estimator.frames()) +
             " frames but " + std::to_string(cfg.target_frames) +
             " were requested");
  }
}

}  // namespace

GuidanceMode parse_guidance_mode(std::string_view name) {
  if (name == "external") return GuidanceMode::kExternal;
  if (name == "built-in" || name == "builtin") return GuidanceMode::kBuiltin;
  fail(ErrorCode::kInvalidArgument,
       "unknown guidance mode '" + std::string(name) + "'");
}

std::string_view to_string(GuidanceMode mode) {
  return mode == GuidanceMode::kExternal ? "external" : "built-in";
}

double default_scale(GuidanceMode mode) {
  return mode == GuidanceMode::kExternal ? 2.0 : 3.0;
}

void GuidanceConfig::validate() const {
  require(std::isfinite(scale) && scale >= 0.0, ErrorCode::kConfiguration,
          "guidance scale must be finite and >= 0");
  require(target_frames >= 1, ErrorCode::kConfiguration,
          "target_frames must be >= 1");
}

FeatureMap cfg_mix(const FeatureMap& eps_uncond, const FeatureMap& eps_cond,
                   double s) {
  require_same_shape(eps_uncond, eps_cond, "cfg_mix");
  require(s >= 0.0, ErrorCode::kInvalidArgument, "guidance scale must be >= 0");
  FeatureMap out = eps_uncond;
  auto o = out.values();
  auto c = eps_cond.values();
  const double keep = 1.0 - s;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = keep * o[i] + s * c[i];
  return out;
}

FeatureMap guided_mean_external(const FeatureMap& mu, double sigma,
                                const FeatureMap& grad, double s) {
  require_same_shape(mu, grad, "guided_mean_external");
  require(sigma >= 0.0, ErrorCode::kInvalidArgument, "sigma must be >= 0");
  if (s == 0.0) return mu;
  FeatureMap out = mu;
  auto o = out.values();
  auto g = grad.values();
  const double step = s * sigma;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += step * g[i];
  return out;
}

double similarity_check(const FeatureMap& xt, const SpeakerEmbedding& e,
                        const DifferentiableEmbedder& embedder) {
  return embedder.embed(xt).dot(e);
}

FeatureMap sample_plain(const NoiseEstimator& estimator,
                        const NoiseSchedule& sched, std::size_t frames,
                        DiffusionSeed& seed,
                        const SpeakerEmbedding* condition) {
  require(frames == estimator.frames(), ErrorCode::kConfiguration,
          "estimator frame count does not match the requested output");
  FeatureMap x = standard_normal(frames, estimator.bins(), seed);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    const FeatureMap eps = estimator.predict(x, t, condition);
    x = reverse_step(x, mu_from_eps(x, eps, t, sched), t, sched, seed);
  }
  return x;
}

FeatureMap sample_external(const SpeakerEmbedding& e, const GuidanceConfig& cfg,
                           const NoiseEstimator& estimator,
                           const DifferentiableEmbedder& embedder,
                           const NoiseSchedule& sched, DiffusionSeed& seed) {
  cfg.validate();
  check_frames(estimator, cfg);
  if (embedder.bins() != estimator.bins() || embedder.dim() != e.dim()) {
    fail(ErrorCode::kConfiguration,
         "embedder is incompatible with the estimator or the reference "
         "embedding");
  }
  FeatureMap x = standard_normal(cfg.target_frames, estimator.bins(), seed);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    if (cfg.trace) emit_trace(cfg.trace, t, similarity_check(x, e, embedder));
    const FeatureMap eps = estimator.predict(x, t, nullptr);
    FeatureMap mu = mu_from_eps(x, eps, t, sched);
    if (cfg.scale != 0.0) {
      mu = guided_mean_external(mu, sigma_t(t, sched), embedder.embed_grad(x, e),
                                cfg.scale);
    }
    x = reverse_step(x, mu, t, sched, seed);
  }
  return x;
}

FeatureMap sample_builtin(const SpeakerEmbedding& e, const GuidanceConfig& cfg,
                          const NoiseEstimator& estimator,
                          const NoiseSchedule& sched, DiffusionSeed& seed,
                          const DifferentiableEmbedder* tracer) {
  cfg.validate();
  check_frames(estimator, cfg);
  if (!estimator.conditional() || estimator.condition_dim() != e.dim()) {
    fail(ErrorCode::kConfiguration,
         "built-in guidance needs a conditional estimator accepting " +
             std::to_string(e.dim()) + "-dim embeddings");
  }
  FeatureMap x = standard_normal(cfg.target_frames, estimator.bins(), seed);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    if (cfg.trace && tracer != nullptr) {
      emit_trace(cfg.trace, t, similarity_check(x, e, *tracer));
    }
    FeatureMap eps;
    // s = 0 and s = 1 need only one estimator branch.
    if (cfg.scale == 0.0) {
      eps = estimator.predict(x, t, nullptr);
    } else if (cfg.scale == 1.0) {
      eps = estimator.predict(x, t, &e);
    } else {
      eps = cfg_mix(estimator.predict(x, t, nullptr), estimator.predict(x, t, &e),
                    cfg.scale);
    }
    x = reverse_step(x, mu_from_eps(x, eps, t, sched), t, sched, seed);
  }
  return x;
}

}  // namespace voxtend
