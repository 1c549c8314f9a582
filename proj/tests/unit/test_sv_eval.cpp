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
#include <string>
#include <vector>

#include "../support/brute_metrics.hpp"
#include "voxtend/error.hpp"
#include "voxtend/rng.hpp"
#include "voxtend/sv_eval.hpp"

using namespace voxtend;

namespace {

ScoreSet make(std::vector<double> same, std::vector<double> diff) {
  ScoreSet s;
  for (double v : same) s.add(v, TrialLabel::kSame);
  for (double v : diff) s.add(v, TrialLabel::kDifferent);
  return s;
}

ScoreSet random_set(DiffusionSeed& seed) {
  ScoreSet s;
  const std::size_t n = 2 + seed.below(199);
  const bool ties = seed.below(2) == 0;
  s.add(seed.normal() + 1, TrialLabel::kSame);
  s.add(seed.normal(), TrialLabel::kDifferent);
  while (s.size() < n) {
    const bool same = seed.uniform() < 0.3;
    double v = seed.normal() + (same ? 1.0 : 0.0);
    if (ties) v = std::round(v * 2.0) / 2.0;
    s.add(v, same ? TrialLabel::kSame : TrialLabel::kDifferent);
  }
  return s;
}

}  // namespace

TEST_CASE("worked EER examples") {
  CHECK(eer(make({0.9, 0.8}, {0.1, 0.2})) == 0.0);
  CHECK(eer(make({0.6, 0.4}, {0.5, 0.3})) == 0.5);
  CHECK(eer(make({1.0}, {1.0})) == 0.5);
}

TEST_CASE("min_dcf boundaries") {
  CHECK(min_dcf(make({0.9, 0.8}, {0.1, 0.2})) == 0.0);
  CHECK(min_dcf(make({0.5, 0.5, 0.5}, {0.5, 0.5})) == 1.0);
  const auto s = make({0.6, 0.4}, {0.5, 0.3});
  CHECK(min_dcf(s) <= 1.0);
}

TEST_CASE("metrics match the exhaustive sweep") {
  DiffusionSeed seed(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_set(seed);
    CHECK(eer(s) == brute::eer(s));
    CHECK(min_dcf(s) == brute::min_dcf(s));
    CHECK(min_dcf(s, 0.05, 2.0, 1.0) == brute::min_dcf(s, 0.05, 2.0, 1.0));
  }
}

TEST_CASE("operating points") {
  const auto pts = operating_points(make({0.6, 0.4}, {0.5, 0.3}));
  REQUIRE(pts.size() == 5);
  CHECK(pts.front().p_miss == 0.0);
  CHECK(pts.front().p_fa == 1.0);
  CHECK(std::isinf(pts.back().threshold));
  CHECK(pts.back().p_miss == 1.0);
  CHECK(pts.back().p_fa == 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].threshold > pts[i - 1].threshold);
    CHECK(pts[i].p_miss >= pts[i - 1].p_miss);
    CHECK(pts[i].p_fa <= pts[i - 1].p_fa);
  }
}

TEST_CASE("metric properties") {
  DiffusionSeed seed(7);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_set(seed);
    ScoreSet warped = s;
    for (double& v : warped.scores) v = std::exp(3.0 * v) + 2.0;
    CHECK(eer(warped) == eer(s));
    CHECK(min_dcf(warped) == min_dcf(s));
    CHECK(min_dcf(s) <= 1.0);
    CHECK(eer(s) >= 0.0);
    CHECK(eer(s) <= 1.0);

    double same_mean = 0, diff_mean = 0, ns = 0, nd = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.labels[k] == TrialLabel::kSame) {
        same_mean += s.scores[k];
        ns += 1;
      } else {
        diff_mean += s.scores[k];
        nd += 1;
      }
    }
    if (same_mean / ns >= diff_mean / nd) CHECK(eer(s) <= 0.5);

    ScoreSet flipped;
    for (std::size_t k = 0; k < s.size(); ++k) {
      flipped.add(-s.scores[k], s.labels[k] == TrialLabel::kSame ? TrialLabel::kDifferent
                                                                 : TrialLabel::kSame);
    }
    CHECK(eer(flipped) == doctest::Approx(eer(s)).epsilon(1e-12));
  }
}

TEST_CASE("min_dcf is zero exactly when a threshold separates") {
  CHECK(min_dcf(make({2, 3}, {1, 2})) > 0.0);
  CHECK(min_dcf(make({2.5, 3}, {1, 2})) == 0.0);
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(eer(make({1, 2}, {})), Error);
  CHECK_THROWS_AS(min_dcf(make({}, {1})), Error);
  CHECK_THROWS_AS(min_dcf(make({1}, {0}), 0.0), Error);
  CHECK_THROWS_AS(eer(make({NAN}, {0})), Error);
}

TEST_CASE("cosine score") {
  const std::vector<double> a{1, 0}, b{0, 1}, c{-1, 0};
  CHECK(cosine_score(a, a) == 1.0);
  CHECK(cosine_score(a, b) == 0.0);
  CHECK(cosine_score(a, c) == -1.0);
  const std::vector<double> off{1.01, 0};
  CHECK_THROWS_AS(cosine_score(a, off), Error);
  CHECK_THROWS_AS(cosine_score(a, std::vector<double>{1, 0, 0}), Error);
}

TEST_CASE("trial lists") {
  auto t = load_trials("1 a.wav b.wav\n");
  REQUIRE(t.size() == 1);
  CHECK(t[0].label == TrialLabel::kSame);
  CHECK(t[0].enroll == "a.wav");
  CHECK(t[0].test == "b.wav");
  t = load_trials("0 a.wav b.wav");
  REQUIRE(t.size() == 1);
  CHECK(t[0].label == TrialLabel::kDifferent);
  CHECK(load_trials("\n1 a b\n\n0 c d\r\n").size() == 2);
  try {
    load_trials("2 a.wav b.wav\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  try {
    load_trials("1 a b\n1 a\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("score csv") {
  const auto s = parse_score_csv("score,label\n0.5,1\n0.25,0\n-1,target\n2,nontarget\n");
  REQUIRE(s.size() == 4);
  CHECK(s.scores[2] == -1.0);
  CHECK(s.labels[2] == TrialLabel::kSame);
  CHECK(s.labels[3] == TrialLabel::kDifferent);
  CHECK_THROWS_AS(parse_score_csv("0.5,1\nabc,1\n"), Error);
  CHECK_THROWS_AS(parse_score_csv("0.5,2\n"), Error);
}
