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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "voxtend/diffusion.hpp"
#include "voxtend/error.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/pipeline.hpp"
#include "voxtend/toy_world.hpp"

using namespace voxtend;
namespace fs = std::filesystem;

namespace {

FeatureMap ramp(std::size_t frames, std::size_t bins) {
  FeatureMap x(frames, bins);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t m = 0; m < bins; ++m) x(f, m) = static_cast<double>(f) + 0.1 * m;
  }
  return x;
}

FeatureMap rows_of(std::size_t frames, std::vector<double> row) {
  FeatureMap x(frames, row.size());
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t m = 0; m < row.size(); ++m) x(f, m) = row[m];
  }
  return x;
}

struct World {
  ToyWorldSpec spec = [] {
    ToyWorldSpec s;
    s.speakers = 4;
    s.frames = 4;
    s.bins = 3;
    s.frame_std = 0.5;
    return s;
  }();
  ToyWorld world{spec};
  ToyEmbedder embedder = make_toy_embedder(3, 3, 5);
  NoiseSchedule sched = build_schedule("linear", 20);
  SmallNetEstimator net = [] {
    SmallNetShape s;
    s.frames = 4;
    s.bins = 3;
    s.hidden = 8;
    s.cond_dim = 3;
    s.steps = 20;
    DiffusionSeed seed(3);
    return SmallNetEstimator::initialize(s, seed);
  }();
  std::map<std::string, FeatureMap> utterances;
  std::vector<Trial> trials;

  World() {
    DiffusionSeed seed(8);
    for (std::size_t k = 0; k < 4; ++k) {
      for (int u = 0; u < 2; ++u) {
        utterances["spk" + std::to_string(k) + "/u" + std::to_string(u)] =
            world.utterance(k, 12, seed);
      }
    }
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        trials.push_back({"spk" + std::to_string(a) + "/u0", "spk" + std::to_string(b) + "/u1",
                          a == b ? TrialLabel::kSame : TrialLabel::kDifferent});
      }
    }
  }

  ExtendContext context() const {
    ExtendContext ctx;
    ctx.embedder = &embedder;
    ctx.generators = {&net};
    ctx.schedule = &sched;
    ctx.frame_shift = 0.125;
    return ctx;
  }
};

std::vector<Condition> all_conditions() {
  return {{ConditionKind::kBaseline, 0.5, 0.0},
          {ConditionKind::kDm, 0.5, 0.5},
          {ConditionKind::kDmPlus, 0.5, 0.5},
          {ConditionKind::kDuplicate, 0.5, 0.0}};
}

}  // namespace

TEST_CASE("condition names and keys") {
  CHECK(parse_condition_kind("dm_plus") == ConditionKind::kDmPlus);
  CHECK(parse_condition_kind("duplicate") == ConditionKind::kDuplicate);
  CHECK_THROWS_AS(parse_condition_kind("triple"), Error);
  CHECK(Condition{ConditionKind::kDmPlus, 0.5, 1.0}.key() == "dm_plus@0.5+1");
  CHECK(Condition{ConditionKind::kBaseline, 1.5, 0.0}.key() == "baseline@1.5");
  CHECK_THROWS_AS(Condition({ConditionKind::kDm, 0.5, 0.0}).validate(), Error);
  CHECK_THROWS_AS(Condition({ConditionKind::kBaseline, -1.0, 0.0}).validate(), Error);
}

TEST_CASE("duration to frames") {
  CHECK(duration_frames(0.5, 0.01) == 50);
  CHECK(duration_frames(0.5, 0.0625) == 8);
  CHECK(duration_frames(0.001, 0.01) == 1);
  CHECK_THROWS_AS(duration_frames(0.5, 0.0), Error);
}

TEST_CASE("clip") {
  const auto x = ramp(100, 2);
  DiffusionSeed seed(1);
  CHECK(clip(x, 1.0, 0.01, seed) == x);
  DiffusionSeed a(5), b(5);
  CHECK(clip(x, 0.3, 0.01, a) == clip(x, 0.3, 0.01, b));
  try {
    clip(x, 1.5, 0.01, seed);
    FAIL("expected a short utterance error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShortUtterance);
  }
}

TEST_CASE("clip offsets are uniform") {
  const auto x = ramp(100, 1);
  DiffusionSeed seed(9);
  std::vector<double> counts(51, 0.0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto c = clip(x, 0.5, 0.01, seed);
    REQUIRE(c.frames() == 50);
    counts[static_cast<std::size_t>(c(0, 0))] += 1;
  }
  double chi2 = 0.0;
  const double expected = n / 51.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(50);
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));
  MESSAGE("chi-square " << chi2 << ", p = " << p);
  CHECK(p > 0.001);
}

TEST_CASE("extend kinds") {
  const World w;
  const auto ctx = w.context();
  const auto& x = w.utterances.at("spk1/u0");
  const auto orig = slice_frames(x, 0, 4);
  DiffusionSeed seed(2);
  CHECK(extend(orig, {ConditionKind::kBaseline, 0.5, 0}, ctx, seed) == orig);

  const auto dup = extend(orig, {ConditionKind::kDuplicate, 0.5, 0}, ctx, seed);
  CHECK(dup.frames() == 8);
  CHECK(slice_frames(dup, 0, 4) == orig);
  CHECK(slice_frames(dup, 4, 4) == orig);

  DiffusionSeed s1(3), s2(3);
  const auto dm = extend(orig, {ConditionKind::kDm, 0.5, 0.5}, ctx, s1);
  const auto plus = extend(orig, {ConditionKind::kDmPlus, 0.5, 0.5}, ctx, s2);
  CHECK(dm.frames() == 4);
  CHECK(plus.frames() == 8);
  CHECK(slice_frames(plus, 0, 4) == orig);
  CHECK(slice_frames(plus, 4, 4) == dm);

  CHECK_THROWS_AS(extend(orig, {ConditionKind::kDm, 0.5, 1.0}, ctx, seed), Error);
  ExtendContext bare = ctx;
  bare.schedule = nullptr;
  CHECK_THROWS_AS(extend(orig, {ConditionKind::kDm, 0.5, 0.5}, bare, seed), Error);
}

TEST_CASE("pooling identity for concatenated features") {
  const World w;
  DiffusionSeed seed(4);
  const auto a = w.world.utterance(0, 5, seed);
  const auto b = w.world.utterance(2, 3, seed);
  const auto pa = w.embedder.pool(a), pb = w.embedder.pool(b);
  const auto pab = w.embedder.pool(concat_frames(a, b));
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(std::fabs(pab[m] - (5 * pa[m] + 3 * pb[m]) / 8) < 1e-12);
  }
}

TEST_CASE("hand-scored protocol") {
  std::map<std::string, FeatureMap> utts{
      {"A", rows_of(2, {1, 0})},
      {"B", rows_of(2, {0.6, 0.8})},
      {"C", rows_of(2, {0, 1})},
      {"D", rows_of(2, {-1, 0})}};
  const std::vector<Trial> trials{{"A", "B", TrialLabel::kSame},
                                  {"A", "C", TrialLabel::kSame},
                                  {"B", "C", TrialLabel::kDifferent},
                                  {"A", "D", TrialLabel::kDifferent}};
  const auto emb = ToyEmbedder::identity(2);
  ExtendContext ctx;
  ctx.embedder = &emb;
  ctx.frame_shift = 1.0;
  const auto out = run_protocol(trials, utts, {{ConditionKind::kBaseline, 2.0, 0}}, ctx, {});
  REQUIRE(out.rows.size() == 1);
  // Same scores {0.6, 0}, different {0.8, -1}.
  CHECK(out.rows[0].eer == 0.5);
  CHECK(out.rows[0].mindcf == 1.0);
  CHECK(out.rows[0].n_trials == 4);
  CHECK(out.rows[0].condition == "baseline");
}

TEST_CASE("duplicate matches baseline and runs repeat") {
  const World w;
  ProtocolConfig cfg;
  cfg.master_seed = 77;
  const auto a = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  const auto b = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows == b.rows);
  CHECK(a.rows[3].eer == a.rows[0].eer);
  CHECK(a.rows[3].mindcf == a.rows[0].mindcf);
  CHECK(a.scores[3].scores == a.scores[0].scores);

  cfg.threads = 3;
  const auto c = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  CHECK(c.rows == a.rows);
  CHECK(c.scores[1].scores == a.scores[1].scores);

  cfg.extend_enroll = false;
  const auto d = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  CHECK(d.rows[0] == a.rows[0]);
}

TEST_CASE("protocol cache") {
  const World w;
  const fs::path dir = fs::temp_directory_path() / "voxtend-pipeline-cache-test";
  fs::remove_all(dir);
  ProtocolConfig cfg;
  cfg.master_seed = 5;
  cfg.cache_dir = dir;
  cfg.model_tag = "net-a";
  const auto first = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    files += entry.is_regular_file() ? 1 : 0;
  }
  CHECK(files > 0);
  const auto second = run_protocol(w.trials, w.utterances, all_conditions(), w.context(), cfg);
  CHECK(second.rows == first.rows);
  ProtocolConfig plain = cfg;
  plain.cache_dir.reset();
  CHECK(run_protocol(w.trials, w.utterances, all_conditions(), w.context(), plain).rows ==
        first.rows);
  fs::remove_all(dir);
}

TEST_CASE("protocol errors name the utterance") {
  World w;
  DiffusionSeed seed(1);
  w.utterances["spk2/u1"] = w.world.utterance(2, 2, seed);
  try {
    run_protocol(w.trials, w.utterances, all_conditions(), w.context(), {});
    FAIL("expected a short utterance error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShortUtterance);
    CHECK(std::string(e.what()).find("spk2/u1") != std::string::npos);
    CHECK(std::string(e.what()).find("baseline@0.5") != std::string::npos);
  }
  std::vector<Trial> missing = w.trials;
  missing.push_back({"nobody", "spk0/u1", TrialLabel::kDifferent});
  CHECK_THROWS_AS(run_protocol(missing, w.utterances, all_conditions(), w.context(), {}),
                  Error);
  CHECK_THROWS_AS(run_protocol({}, w.utterances, all_conditions(), w.context(), {}), Error);
}

TEST_CASE("result tables") {
  const std::vector<ResultRow> rows{{"baseline", 0.5, 0.0, 0.25, 0.5, 16},
                                    {"dm_plus", 0.5, 1.0, 0.125, 1.0, 16}};
  CHECK(results_csv(rows) ==
        "condition,clip_s,gen_s,eer,mindcf,n_trials\n"
        "baseline,0.5,0,0.25,0.5,16\n"
        "dm_plus,0.5,1,0.125,1,16\n");
  const std::vector<EmbeddingRow> emb{
      {"dm@0.5+0.5", "extended", "u1", SpeakerEmbedding({0.6, 0.8})}};
  CHECK(embeddings_csv(emb) == "condition,form,utterance,e0,e1\ndm@0.5+0.5,extended,u1,0.6,0.8\n");
}
