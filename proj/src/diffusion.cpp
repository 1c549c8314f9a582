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

#include "voxtend/diffusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

constexpr double kLinearBetaStart = 1e-4;
constexpr double kLinearBetaEnd = 2e-2;
constexpr double kCosineOffset = 0.008;
constexpr double kCosineMaxBeta = 0.999;

std::vector<double> cumulative_product(const std::vector<double>& alpha) {
  std::vector<double> out(alpha.size());
  double acc = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    acc *= alpha[i];
    out[i] = acc;
  }
  return out;
}

}  // namespace

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "cosine") return ScheduleKind::kCosine;
  fail(ErrorCode::kInvalidArgument,
       "unknown schedule kind '" + std::string(name) + "'");
}

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::kLinear ? "linear" : "cosine";
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas,
                                        VarianceKind variance) {
  require(!betas.empty(), ErrorCode::kInvalidArgument,
          "schedule needs at least one step");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    require(betas[i] > 0.0 && betas[i] < 1.0, ErrorCode::kInvalidArgument,
            "beta at step " + std::to_string(i + 1) + " outside (0, 1)");
  }
  NoiseSchedule s;
  s.alpha_.resize(betas.size());
  std::transform(betas.begin(), betas.end(), s.alpha_.begin(),
                 [](double b) { return 1.0 - b; });
  s.alpha_bar_ = cumulative_product(s.alpha_);
  s.beta_ = std::move(betas);
  s.variance_ = variance;
  return s;
}

NoiseSchedule NoiseSchedule::from_raw(std::vector<double> alpha,
                                      std::vector<double> alpha_bar,
                                      VarianceKind variance) {
  require(!alpha.empty() && alpha.size() == alpha_bar.size(),
          ErrorCode::kInvalidArgument, "raw schedule vectors must match");
  NoiseSchedule s;
  s.beta_.resize(alpha.size());
  std::transform(alpha.begin(), alpha.end(), s.beta_.begin(),
                 [](double a) { return 1.0 - a; });
  s.alpha_ = std::move(alpha);
  s.alpha_bar_ = std::move(alpha_bar);
  s.variance_ = variance;
  return s;
}

NoiseSchedule NoiseSchedule::with_variance(VarianceKind variance) const {
  NoiseSchedule copy = *this;
  copy.variance_ = variance;
  return copy;
}

void NoiseSchedule::check_step(std::size_t t) const {
  if (t < 1 || t > beta_.size()) {
    fail(ErrorCode::kInvalidArgument,
         "step " + std::to_string(t) + " outside [1, " +
             std::to_string(beta_.size()) + "]");
  }
}

NoiseSchedule build_schedule(ScheduleKind kind, std::size_t steps) {
  require(steps >= 1, ErrorCode::kInvalidArgument,
          "schedule needs at least one step");
  std::vector<double> betas(steps);
  if (kind == ScheduleKind::kLinear) {
    for (std::size_t i = 0; i < steps; ++i) {
      const double f =
          steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
      betas[i] = kLinearBetaStart * (1.0 - f) + kLinearBetaEnd * f;
    }
  } else {
    auto curve = [steps](std::size_t i) {
      const double x = (static_cast<double>(i) / static_cast<double>(steps) +
                        kCosineOffset) /
                       (1.0 + kCosineOffset) * std::numbers::pi / 2.0;
      return std::cos(x) * std::cos(x);
    };
    for (std::size_t i = 0; i < steps; ++i) {
      betas[i] = std::min(1.0 - curve(i + 1) / curve(i), kCosineMaxBeta);
    }
  }
  return NoiseSchedule::from_betas(std::move(betas));
}

NoiseSchedule build_schedule(std::string_view kind, std::size_t steps) {
  return build_schedule(parse_schedule_kind(kind), steps);
}

FeatureMap standard_normal(std::size_t frames, std::size_t bins,
                           DiffusionSeed& seed) {
  FeatureMap out(frames, bins);
  for (double& v : out.values()) v = seed.normal();
  return out;
}

FeatureMap forward_step(const FeatureMap& x_prev, std::size_t t,
                        const NoiseSchedule& sched, DiffusionSeed& seed) {
  const double a = sched.alpha(t);
  const double keep = std::sqrt(a);
  const double noise = std::sqrt(1.0 - a);
  FeatureMap out = x_prev;
  for (double& v : out.values()) v = keep * v + noise * seed.normal();
  return out;
}

NoisedSample forward_jump(const FeatureMap& x0, std::size_t t,
                          const NoiseSchedule& sched, DiffusionSeed& seed) {
  const double ab = sched.alpha_bar(t);
  const double keep = std::sqrt(ab);
  const double noise = std::sqrt(1.0 - ab);
  NoisedSample s{x0, standard_normal(x0.frames(), x0.bins(), seed)};
  auto xt = s.xt.values();
  auto eps = s.eps.values();
  for (std::size_t i = 0; i < xt.size(); ++i) {
    xt[i] = keep * xt[i] + noise * eps[i];
  }
  return s;
}

FeatureMap mu_from_eps(const FeatureMap& xt, const FeatureMap& eps_hat,
                       std::size_t t, const NoiseSchedule& sched) {
  require_same_shape(xt, eps_hat, "mu_from_eps");
  const double a = sched.alpha(t);
  const double ab = sched.alpha_bar(t);
  require(1.0 - ab > 0.0, ErrorCode::kDivisionByZero,
          "mu_from_eps: alpha_bar is 1 at step " + std::to_string(t));
  const double inv_sqrt_alpha = 1.0 / std::sqrt(a);
  const double coef = (1.0 - a) / std::sqrt(1.0 - ab);
  FeatureMap mu = xt;
  auto out = mu.values();
  auto e = eps_hat.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = inv_sqrt_alpha * (out[i] - coef * e[i]);
  }
  return mu;
}

double sigma_t(std::size_t t, const NoiseSchedule& sched) {
  const double beta = sched.beta(t);
  if (t == 1 || sched.variance() == VarianceKind::kBeta) return beta;
  const double denom = 1.0 - sched.alpha_bar(t);
  require(denom > 0.0, ErrorCode::kDivisionByZero,
          "sigma_t: alpha_bar is 1 at step " + std::to_string(t));
  return std::max(0.0, (1.0 - sched.alpha_bar(t - 1)) / denom * beta);
}

FeatureMap reverse_step(const FeatureMap& xt, const FeatureMap& mu,
                        std::size_t t, const NoiseSchedule& sched,
                        DiffusionSeed& seed) {
  require_same_shape(xt, mu, "reverse_step");
  sched.check_step(t);
  if (t == 1) return mu;
  const double stddev = std::sqrt(sigma_t(t, sched));
  FeatureMap out = mu;
  for (double& v : out.values()) v += stddev * seed.normal();
  return out;
}

double l_simple(const FeatureMap& eps, const FeatureMap& eps_hat) {
  require_same_shape(eps, eps_hat, "l_simple");
  auto a = eps.values();
  auto b = eps_hat.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

std::string serialize_schedule(const NoiseSchedule& sched) {
  std::ostringstream out;
  out << "voxtend-schedule v1\n";
  out << "T=" << sched.steps() << "\n";
  char buf[40];
  for (double b : sched.betas()) {
    std::snprintf(buf, sizeof buf, "%.17g", b);
    out << "beta=" << buf << "\n";
  }
  return out.str();
}

NoiseSchedule parse_schedule(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kFormat,
         "schedule line " + std::to_string(line_no) + ": " + why);
  };
  if (!next() || line != "voxtend-schedule v1") bad("expected header 'voxtend-schedule v1'");
  if (!next() || line.rfind("T=", 0) != 0) bad("expected 'T=<int>'");
  std::size_t steps = 0;
  {
    auto [p, ec] = std::from_chars(line.data() + 2, line.data() + line.size(), steps);
    if (ec != std::errc() || p != line.data() + line.size() || steps == 0) bad("invalid T");
  }
  std::vector<double> betas;
  while (next()) {
    if (line.rfind("beta=", 0) != 0) bad("expected 'beta=<decimal>'");
    double v = 0.0;
    auto [p, ec] = std::from_chars(line.data() + 5, line.data() + line.size(), v);
    if (ec != std::errc() || p != line.data() + line.size()) bad("invalid beta value");
    betas.push_back(v);
  }
  if (betas.size() != steps) {
    fail(ErrorCode::kFormat, "schedule declares T=" + std::to_string(steps) +
                                 " but lists " + std::to_string(betas.size()) +
                                 " betas");
  }
  return NoiseSchedule::from_betas(std::move(betas));
}

}  // namespace voxtend
