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

#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "voxtend/diffusion.hpp"
#include "voxtend/error.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/rng.hpp"

using namespace voxtend;

namespace {


ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("linear schedule endpoints") {
  const auto s = build_schedule(ScheduleKind::kLinear, 1000);
  CHECK(s.steps() == 1000);
  CHECK(s.beta(1) == 1e-4);
  CHECK(s.beta(1000) == 2e-2);
  CHECK(s.alpha(1) == 0.9999);

  const auto one = build_schedule("linear", 1);
  CHECK(one.beta(1) == 1e-4);
  CHECK(one.alpha_bar(1) == 0.9999);
}

TEST_CASE("alpha_bar matches an arbitrary-precision product") {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const auto s = build_schedule(ScheduleKind::kLinear, 1000);
  Big prod = 1;
  const Big start("1e-4"), end("2e-2");
  for (int t = 0; t < 1000; ++t) {
    const Big beta = start + (end - start) * Big(t) / Big(999);
    prod *= Big(1) - beta;
  }
  const double oracle = prod.convert_to<double>();
  CHECK(std::fabs(s.alpha_bar(1000) - oracle) / oracle < 1e-12);
  // Frozen value from a separate 40-digit computation.
  CHECK(std::fabs(oracle - 4.035829765375683314817635e-5) < 1e-20);
}

TEST_CASE("schedules satisfy their invariants") {
  for (auto kind : {ScheduleKind::kLinear, ScheduleKind::kCosine}) {
    for (std::size_t T : {1u, 2u, 200u, 1000u}) {
      const auto s = build_schedule(kind, T);
      for (std::size_t t = 1; t <= T; ++t) {
        CHECK(s.beta(t) > 0.0);
        CHECK(s.beta(t) < 1.0);
        CHECK(s.alpha(t) == 1.0 - s.beta(t));
        if (t > 1) {
          const double ratio = s.alpha_bar(t) / s.alpha_bar(t - 1);
          CHECK(std::fabs(ratio - s.alpha(t)) / s.alpha(t) < 1e-12);
          CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
        }
      }
    }
  }
}

TEST_CASE("build_schedule rejects bad input") {
  CHECK(code_of([] { build_schedule(ScheduleKind::kLinear, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { build_schedule("quadratic", 10); }) ==
        ErrorCode::kInvalidArgument);
  const auto s = build_schedule("cosine", 10);
  CHECK(code_of([&] { (void)s.beta(0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { (void)s.beta(11); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("forward_step edge cases") {
  const auto sched = NoiseSchedule::from_raw({1.0}, {1.0});
  DiffusionSeed seed(3);
  FeatureMap x(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(forward_step(x, 1, sched, seed) == x);

  const auto lin = build_schedule("linear", 10);
  CHECK(code_of([&] { forward_step(x, 11, lin, seed); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("forward_step moments") {
  const auto s = build_schedule("linear", 100);
  DiffusionSeed seed(11);
  const FeatureMap x(1, 1, 2.0);
  const std::size_t t = 60;
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = forward_step(x, t, s, seed)(0, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean - std::sqrt(s.alpha(t)) * 2.0) < 4 * std::sqrt(s.beta(t) / n));
  CHECK(std::fabs(var / s.beta(t) - 1.0) < 0.03);
}

TEST_CASE("forward_jump returns the noise it used") {
  const auto s = build_schedule("linear", 200);
  DiffusionSeed seed(5);
  DiffusionSeed seed_copy(5);
  FeatureMap x0(3, 4, 0.7);
  const auto out = forward_jump(x0, 150, s, seed);
  const auto eps = standard_normal(3, 4, seed_copy);
  CHECK(out.eps == eps);
  const double a = s.alpha_bar(150);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    CHECK(out.xt.values()[i] ==
          doctest::Approx(std::sqrt(a) * 0.7 + std::sqrt(1 - a) * eps.values()[i]).epsilon(1e-15));
  }

  const auto clean = NoiseSchedule::from_raw({1.0}, {1.0});
  CHECK(forward_jump(x0, 1, clean, seed).xt == x0);

  const auto noisy = NoiseSchedule::from_raw({0.5}, {1e-12});
  const auto pure = forward_jump(x0, 1, noisy, seed);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    CHECK(std::fabs(pure.xt.values()[i] - pure.eps.values()[i]) < 1e-5);
  }
}

TEST_CASE("mu_from_eps") {
  const FeatureMap xt(1, 1, 1.0);
  const FeatureMap eps(1, 1, 0.5);
  const auto s = NoiseSchedule::from_raw({0.99}, {0.9});
  // 40-digit reference: 0.98914677210511887023...
  CHECK(std::fabs(mu_from_eps(xt, eps, 1, s)(0, 0) - 0.9891467721051188702) < 1e-15);

  const auto identity = NoiseSchedule::from_raw({1.0, 1.0}, {0.5, 0.5});
  FeatureMap x(2, 2, std::vector<double>{1, -2, 3, 0.25});
  CHECK(mu_from_eps(x, FeatureMap(2, 2, 0.0), 2, identity) == x);

  const auto degenerate = NoiseSchedule::from_raw({1.0}, {1.0});
  CHECK(code_of([&] { mu_from_eps(x, x, 1, degenerate); }) ==
        ErrorCode::kDivisionByZero);
  CHECK(code_of([&] { mu_from_eps(x, FeatureMap(1, 2), 1, s); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("sigma_t") {
  const auto s = build_schedule("linear", 1000);
  CHECK(sigma_t(1, s) == s.beta(1));
  // 40-digit reference for ((1 - abar_1) / (1 - abar_2)) * beta_2.
  CHECK(std::fabs(sigma_t(2, s) / 5.45318766130260539468652e-5 - 1.0) < 1e-12);
  for (std::size_t t = 1; t <= 1000; ++t) CHECK(sigma_t(t, s) >= 0.0);
  CHECK(sigma_t(2, s.with_variance(VarianceKind::kBeta)) == s.beta(2));
}

TEST_CASE("reverse_step") {
  const auto s = build_schedule("linear", 1000);
  DiffusionSeed seed(21);
  FeatureMap xt(1, 3, 0.3);
  FeatureMap mu(1, 3, std::vector<double>{0.1, 0.2, -0.4});
  CHECK(reverse_step(xt, mu, 1, s, seed) == mu);

  const FeatureMap x1(1, 1, 0.0), m1(1, 1, 1.5);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = reverse_step(x1, m1, 500, s, seed)(0, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(var / sigma_t(500, s) - 1.0) < 0.03);
  CHECK(std::fabs(mean - 1.5) < 4 * std::sqrt(sigma_t(500, s) / n));
}

TEST_CASE("l_simple") {
  CHECK(l_simple(FeatureMap(1, 2, std::vector<double>{1, 0}), FeatureMap(1, 2)) == 0.5);
  DiffusionSeed seed(2);
  const auto a = standard_normal(4, 4, seed);
  CHECK(l_simple(a, a) == 0.0);
  CHECK(l_simple(a, standard_normal(4, 4, seed)) >= 0.0);
  CHECK(code_of([&] { l_simple(a, FeatureMap(4, 3)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("schedule text round trip") {
  for (auto kind : {ScheduleKind::kLinear, ScheduleKind::kCosine}) {
    const auto s = build_schedule(kind, 57);
    const std::string text = serialize_schedule(s);
    CHECK(text.rfind("voxtend-schedule v1\nT=57\nbeta=", 0) == 0);
    const auto back = parse_schedule(text);
    CHECK(back.betas() == s.betas());
    for (std::size_t t = 1; t <= 57; ++t) CHECK(back.alpha_bar(t) == s.alpha_bar(t));
  }
  CHECK(code_of([] { parse_schedule("voxtend-schedule v2\nT=1\nbeta=0.1\n"); }) ==
        ErrorCode::kFormat);
  CHECK(code_of([] { parse_schedule("voxtend-schedule v1\nT=2\nbeta=0.1\n"); }) ==
        ErrorCode::kFormat);
  CHECK(code_of([] { parse_schedule("voxtend-schedule v1\nT=1\nbeta=1.5\n"); }) !=
        ErrorCode::kIo);
}

TEST_CASE("seeds are reproducible") {
  DiffusionSeed a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(DiffusionSeed::derive(1, "x") == DiffusionSeed::derive(1, "x"));
  CHECK(DiffusionSeed::derive(1, "x") != DiffusionSeed::derive(2, "x"));
  CHECK(DiffusionSeed::derive(1, "x") != DiffusionSeed::derive(1, "y"));
  DiffusionSeed c(4);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("standard_normal moments") {
  DiffusionSeed seed(8);
  const auto x = standard_normal(400, 250, seed);
  double sum = 0.0, sq = 0.0;
  for (double v : x.values()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(x.size());
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(std::fabs(sq / n - 1.0) < 0.01);
}

TEST_CASE("feature map helpers") {
  FeatureMap a(2, 2, std::vector<double>{1, 2, 3, 4});
  FeatureMap b(1, 2, std::vector<double>{5, 6});
  const auto c = concat_frames(a, b);
  CHECK(c.frames() == 3);
  CHECK(c(2, 1) == 6);
  CHECK(slice_frames(c, 1, 2) == FeatureMap(2, 2, std::vector<double>{3, 4, 5, 6}));
  CHECK(code_of([&] { slice_frames(c, 2, 2); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { concat_frames(a, FeatureMap(1, 3)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { FeatureMap(0, 3); }) == ErrorCode::kInvalidArgument);
}
