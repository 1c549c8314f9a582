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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "voxtend/diffusion.hpp"
#include "voxtend/embedding.hpp"
#include "voxtend/error.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/toy_world.hpp"
#include "voxtend/training.hpp"

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

FeatureMap random_map(std::size_t f, std::size_t m, DiffusionSeed& seed,
                      double scale = 1.0) {
  FeatureMap x(f, m);
  for (double& v : x.values()) v = scale * seed.normal();
  return x;
}

SpeakerEmbedding random_unit(std::size_t d, DiffusionSeed& seed) {
  std::vector<double> v(d);
  for (double& x : v) x = seed.normal();
  return SpeakerEmbedding::normalized(v);
}

double silu(double a) { return a / (1.0 + std::exp(-a)); }

// Straight loop version of the estimator's forward pass.
std::vector<double> loop_forward(const SmallNetEstimator& net, const FeatureMap& x,
                                 std::size_t t, const SpeakerEmbedding* e) {
  const auto& s = net.shape();
  const auto& p = net.params();
  const std::size_t in = s.input_dim(), h = s.hidden;
  std::vector<double> temb(16);
  for (std::size_t j = 0; j < 8; ++j) {
    const double w = static_cast<double>(t) / std::pow(10000.0, j / 8.0);
    temb[j] = std::sin(w);
    temb[j + 8] = std::cos(w);
  }
  std::vector<double> h1(h), h2(h), out(in);
  for (std::size_t r = 0; r < h; ++r) {
    double a = p[NetTensors::kInB](r, 0);
    for (std::size_t c = 0; c < in; ++c) a += p[NetTensors::kInW](r, c) * x.values()[c];
    for (std::size_t c = 0; c < 16; ++c) a += p[NetTensors::kTimeW](r, c) * temb[c];
    if (e) {
      for (std::size_t c = 0; c < s.cond_dim; ++c) a += p[NetTensors::kCondW](r, c) * (*e)[c];
    } else {
      a += p[NetTensors::kNullToken](r, 0);
    }
    h1[r] = silu(a);
  }
  for (std::size_t r = 0; r < h; ++r) {
    double a = p[NetTensors::kMidB](r, 0);
    for (std::size_t c = 0; c < h; ++c) a += p[NetTensors::kMidW](r, c) * h1[c];
    h2[r] = silu(a);
  }
  for (std::size_t r = 0; r < in; ++r) {
    double a = p[NetTensors::kOutB](r, 0);
    for (std::size_t c = 0; c < h; ++c) a += p[NetTensors::kOutW](r, c) * h2[c];
    out[r] = a;
  }
  return out;
}

SmallNetShape tiny_shape() {
  SmallNetShape s;
  s.frames = 2;
  s.bins = 3;
  s.hidden = 7;
  s.cond_dim = 4;
  s.steps = 30;
  return s;
}

}  // namespace

TEST_CASE("embed worked examples") {
  const auto id = ToyEmbedder::identity(3);
  FeatureMap x(4, 3);
  for (std::size_t f = 0; f < 4; ++f) {
    x(f, 0) = 1.0;
    x(f, 1) = -2.0;
    x(f, 2) = 2.0;
  }
  const auto e = id.embed(x);
  CHECK(e[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto id2 = ToyEmbedder::identity(2);
  const auto e2 = id2.embed(FeatureMap(1, 2, std::vector<double>{3, 4}));
  CHECK(e2[0] == 0.6);
  CHECK(e2[1] == 0.8);

  CHECK(code_of([&] { id2.embed(FeatureMap(2, 2, 0.0)); }) ==
        ErrorCode::kDegenerateEmbedding);
  CHECK(code_of([&] { id2.embed(FeatureMap(2, 3, 1.0)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("embedding is unchanged by duplicating frames") {
  DiffusionSeed seed(31);
  const auto emb = make_toy_embedder(6, 5, 1);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_map(1 + seed.below(20), 5, seed, 3.0);
    CHECK(emb.embed(concat_frames(x, x)) == emb.embed(x));
  }
}

TEST_CASE("embedding norm") {
  DiffusionSeed seed(32);
  const auto emb = make_toy_embedder(8, 8, 2);
  for (int i = 0; i < 200; ++i) {
    const auto e = emb.embed(random_map(5, 8, seed, 10.0));
    double n = 0.0;
    for (double v : e.values()) n += v * v;
    CHECK(std::fabs(std::sqrt(n) - 1.0) < 1e-9);
  }
}

TEST_CASE("embed_grad matches central differences") {
  DiffusionSeed seed(33);
  const auto emb = make_toy_embedder(6, 4, 9);
  for (int point = 0; point < 10; ++point) {
    FeatureMap x = random_map(3, 4, seed);
    const auto e = random_unit(6, seed);
    const auto g = emb.embed_grad(x, e);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double old = x.values()[i];
      const double h = 1e-6;
      x.values()[i] = old + h;
      const double up = emb.embed(x).dot(e);
      x.values()[i] = old - h;
      const double down = emb.embed(x).dot(e);
      x.values()[i] = old;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::fabs(fd - g.values()[i]) /
                                  std::max(std::fabs(g.values()[i]), 1e-3));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("embed_grad structure") {
  DiffusionSeed seed(34);
  const auto emb = make_toy_embedder(5, 4, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_map(6, 4, seed);
    const auto g = emb.embed_grad(x, emb.embed(x));
    double radial = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) radial += g.values()[k] * x.values()[k];
    CHECK(std::fabs(radial) < 1e-9);

    const auto g2 = emb.embed_grad(x, random_unit(5, seed));
    for (std::size_t f = 1; f < 6; ++f) {
      for (std::size_t m = 0; m < 4; ++m) CHECK(std::fabs(g2(f, m) - g2(0, m)) < 1e-12);
    }
  }
}

TEST_CASE("toy embedder tolerates noise") {
  // Measured average similarity at sigma = 0.5 is about 0.99.
  ToyWorldSpec spec;
  const ToyWorld world(spec);
  const auto emb = make_toy_embedder(8, 8, 4);
  DiffusionSeed seed(35);
  for (double sigma : {0.1, 0.25, 0.5}) {
    double total = 0.0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const auto x = world.utterance(i % 2, 8, seed);
      FeatureMap noisy = x;
      for (double& v : noisy.values()) v += sigma * seed.normal();
      total += emb.embed(noisy).dot(emb.embed(x));
    }
    MESSAGE("sigma " << sigma << ": mean similarity " << total / n);
    CHECK(total / n > 0.9);
  }
}

TEST_CASE("analytic estimator closed form") {
  const auto s = build_schedule("linear", 200);
  const AnalyticGaussianEstimator est(FeatureMap(1, 4, 0.0), 1.0, s);
  DiffusionSeed seed(40);
  const auto x = random_map(1, 4, seed);
  for (std::size_t t : {1u, 50u, 200u}) {
    const auto eps = analytic_eps(x, t, est);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(eps.values()[i] ==
            doctest::Approx(std::sqrt(1 - s.alpha_bar(t)) * x.values()[i]).epsilon(1e-14));
    }
  }
  CHECK(code_of([&] { analytic_eps(x, 201, est); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { AnalyticGaussianEstimator(FeatureMap(1, 4), 0.0, s); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("analytic estimator agrees with a regression fit") {
  const auto s = build_schedule("linear", 200);
  const std::size_t t = 120;
  const AnalyticGaussianEstimator est(FeatureMap(1, 1, 0.0), 1.0, s);
  DiffusionSeed seed(41);
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const FeatureMap x0(1, 1, seed.normal());
    const auto d = forward_jump(x0, t, s, seed);
    sxy += d.eps(0, 0) * d.xt(0, 0);
    sxx += d.xt(0, 0) * d.xt(0, 0);
  }
  const double slope = sxy / sxx;
  const double closed = analytic_eps(FeatureMap(1, 1, 1.0), t, est)(0, 0);
  CHECK(std::fabs(slope - closed) < 0.01);
}

TEST_CASE("analytic estimator limits and optimality") {
  const auto clean = NoiseSchedule::from_raw({1.0}, {1.0});
  FeatureMap mean0(2, 2, std::vector<double>{0.5, -1.0, 2.0, 0.0});
  const AnalyticGaussianEstimator at_limit(mean0, 0.7, clean);
  const auto limit = analytic_eps(mean0, 1, at_limit);
  for (double v : limit.values()) CHECK(std::fabs(v) < 1e-12);

  const auto s = build_schedule("linear", 200);
  const AnalyticGaussianEstimator est(mean0, 0.7, s);
  DiffusionSeed seed(42);
  for (std::size_t t : {20u, 100u, 180u}) {
    double best = 0.0, lo = 0.0, hi = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      FeatureMap x0 = mean0;
      for (double& v : x0.values()) v += std::sqrt(0.7) * seed.normal();
      const auto d = forward_jump(x0, t, s, seed);
      const auto pred = analytic_eps(d.xt, t, est);
      FeatureMap down = pred, up = pred;
      for (double& v : down.values()) v *= 0.9;
      for (double& v : up.values()) v *= 1.1;
      best += l_simple(d.eps, pred);
      lo += l_simple(d.eps, down);
      hi += l_simple(d.eps, up);
    }
    CHECK(best < lo);
    CHECK(best < hi);
  }
}

TEST_CASE("net forward") {
  DiffusionSeed seed(50);
  const auto shape = tiny_shape();
  const auto zero = SmallNetEstimator::zeros(shape);
  const auto x = random_map(2, 3, seed);
  const auto e = random_unit(4, seed);
  const auto with_cond = net_forward(x, 3, &e, zero);
  const auto without = net_forward(x, 3, nullptr, zero);
  for (double v : with_cond.values()) CHECK(v == 0.0);
  for (double v : without.values()) CHECK(v == 0.0);

  const auto net = SmallNetEstimator::initialize(shape, seed);
  CHECK(net_forward(x, 7, &e, net) == net_forward(x, 7, &e, net));
  for (std::size_t t : {1u, 13u, 30u}) {
    for (const SpeakerEmbedding* c : {&e, static_cast<const SpeakerEmbedding*>(nullptr)}) {
      const auto got = net_forward(x, t, c, net);
      const auto want = loop_forward(net, x, t, c);
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::fabs(got.values()[i] - want[i]) < 1e-10);
      }
    }
  }
  CHECK(code_of([&] { net_forward(random_map(3, 3, seed), 1, &e, net); }) ==
        ErrorCode::kConfiguration);
  CHECK(code_of([&] { net_forward(x, 31, &e, net); }) == ErrorCode::kInvalidArgument);
  const auto wrong = random_unit(5, seed);
  CHECK(code_of([&] { net_forward(x, 1, &wrong, net); }) == ErrorCode::kConfiguration);
}

TEST_CASE("initialization bounds") {
  DiffusionSeed seed(51);
  const auto net = SmallNetEstimator::initialize(tiny_shape(), seed);
  const auto& p = net.params();
  const double fan_in[] = {6, 6, 16, 4, 4, 7, 7, 7, 7};
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    CHECK(p[i].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(fan_in[i]));
  }
}

TEST_CASE("net_grad matches central differences") {
  DiffusionSeed seed(52);
  const auto sched = build_schedule("linear", 30);
  for (int point = 0; point < 10; ++point) {
    auto net = SmallNetEstimator::initialize(tiny_shape(), seed);
    std::vector<TrainItem> batch;
    for (int i = 0; i < 4; ++i) {
      TrainItem item{random_map(2, 3, seed), 1 + seed.below(30), {}};
      if (i % 2 == 0) item.condition = random_unit(4, seed);
      batch.push_back(std::move(item));
    }
    const DiffusionSeed noise(seed.next());
    const auto g = net_grad(batch, net, sched, noise);
    CHECK(g.loss >= 0.0);
    CHECK(g.loss == net_loss(batch, net, sched, noise));
    for (std::size_t k = 0; k < NetTensors::kCount; ++k) {
      auto& param = net.mutable_params()[k];
      Eigen::MatrixXd fd(param.rows(), param.cols());
      for (Eigen::Index i = 0; i < param.size(); ++i) {
        const double old = param.data()[i];
        const double h = 1e-6;
        param.data()[i] = old + h;
        const double up = net_loss(batch, net, sched, noise);
        param.data()[i] = old - h;
        const double down = net_loss(batch, net, sched, noise);
        param.data()[i] = old;
        fd.data()[i] = (up - down) / (2 * h);
      }
      const double rel = (fd - g.grads[k]).norm() / g.grads[k].norm();
      INFO("tensor " << NetTensors::kNames[k]);
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("net_grad averages over the batch") {
  DiffusionSeed seed(53);
  const auto sched = build_schedule("linear", 30);
  const auto net = SmallNetEstimator::initialize(tiny_shape(), seed);
  TrainItem item{random_map(2, 3, seed), 11, random_unit(4, seed)};
  const std::vector<TrainItem> batch(3, item);
  const DiffusionSeed noise(77);
  const auto g = net_grad(batch, net, sched, noise);

  // Item k of the batch sees the k-th noise map drawn from the stream.
  NetTensors mean = NetTensors::zeros_like(g.grads);
  double loss = 0.0;
  DiffusionSeed stream(77);
  for (int k = 0; k < 3; ++k) {
    const auto single = net_grad({item}, net, sched, stream);
    standard_normal(2, 3, stream);
    loss += single.loss / 3;
    for (std::size_t i = 0; i < NetTensors::kCount; ++i) mean[i] += single.grads[i] / 3;
  }
  CHECK(g.loss == doctest::Approx(loss).epsilon(1e-12));
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    CHECK((g.grads[i] - mean[i]).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(code_of([&] { net_grad({}, net, sched, noise); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("training is deterministic and records losses") {
  ToyWorldSpec spec;
  const auto emb = make_toy_embedder(8, 8, 4);
  const ToyDataset data(ToyWorld(spec), emb);
  const auto sched = build_schedule("linear", 50);
  SmallNetShape shape;
  shape.hidden = 16;
  shape.steps = 50;
  TrainConfig cfg;
  cfg.steps = 40;
  cfg.batch = 4;
  cfg.learning_rate = 0.5;
  auto run = [&] {
    DiffusionSeed seed(60);
    auto net = SmallNetEstimator::initialize(shape, seed);
    return train_estimator(data, net, cfg, sched, seed);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.losses.size() == 40);
  CHECK(a.losses == b.losses);
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    CHECK(a.net.params()[i] == b.net.params()[i]);
  }
}

TEST_CASE("full dropout leaves the condition projection untouched") {
  ToyWorldSpec spec;
  const auto emb = make_toy_embedder(8, 8, 4);
  const ToyDataset data(ToyWorld(spec), emb);
  const auto sched = build_schedule("linear", 50);
  SmallNetShape shape;
  shape.hidden = 16;
  shape.steps = 50;
  DiffusionSeed seed(61);
  const auto init = SmallNetEstimator::initialize(shape, seed);
  TrainConfig cfg;
  cfg.steps = 30;
  cfg.batch = 4;
  cfg.learning_rate = 0.5;
  cfg.p_uncond = 1.0;
  const auto out = train_estimator(data, init, cfg, sched, seed);
  CHECK(out.net.params()[NetTensors::kCondW] == init.params()[NetTensors::kCondW]);
  CHECK(out.net.params()[NetTensors::kNullToken] != init.params()[NetTensors::kNullToken]);
}

TEST_CASE("divergence names the epoch") {
  ToyWorldSpec spec;
  spec.spread = 50.0;
  const auto emb = make_toy_embedder(8, 8, 4);
  const ToyDataset data(ToyWorld(spec), emb);
  const auto sched = build_schedule("linear", 50);
  SmallNetShape shape;
  shape.hidden = 16;
  shape.steps = 50;
  DiffusionSeed seed(62);
  TrainConfig cfg;
  cfg.steps = 200;
  cfg.batch = 4;
  cfg.learning_rate = 1e6;
  try {
    train_estimator(data, SmallNetEstimator::initialize(shape, seed), cfg, sched, seed);
    FAIL("training should diverge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTrainingDiverged);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("training validates its inputs") {
  ToyWorldSpec spec;
  const auto emb = make_toy_embedder(8, 8, 4);
  const ToyDataset data(ToyWorld(spec), emb);
  const auto sched = build_schedule("linear", 50);
  SmallNetShape shape;
  shape.steps = 40;
  DiffusionSeed seed(63);
  const auto net = SmallNetEstimator::initialize(shape, seed);
  CHECK(code_of([&] { train_estimator(data, net, TrainConfig{}, sched, seed); }) ==
        ErrorCode::kConfiguration);
  TrainConfig bad;
  bad.p_uncond = 1.5;
  shape.steps = 50;
  const auto net2 = SmallNetEstimator::initialize(shape, seed);
  CHECK(code_of([&] { train_estimator(data, net2, bad, sched, seed); }) ==
        ErrorCode::kConfiguration);
}

TEST_CASE("smoothed loss") {
  const std::vector<double> v{4, 2, 6, 8};
  CHECK(smoothed_loss(v, 2, false) == 3.0);
  CHECK(smoothed_loss(v, 2, true) == 7.0);
  CHECK(smoothed_loss(v, 10, true) == 5.0);
}

TEST_CASE("toy world") {
  ToyWorldSpec spec;
  spec.speakers = 5;
  const ToyWorld world(spec);
  for (std::size_t k = 0; k < 5; ++k) CHECK(world.nearest_speaker(world.mean_map(k)) == k);
  DiffusionSeed a(70), b(70);
  CHECK(world.utterance(3, 17, a) == world.utterance(3, 17, b));
  CHECK(ToyWorld(spec).pattern(2) == world.pattern(2));
  const auto emb = make_toy_embedder(8, 8, 4);
  const ToyDataset data(world, emb);
  CHECK(data.reference(1) == emb.embed(world.mean_map(1)));
}
