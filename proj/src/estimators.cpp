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

#include "voxtend/estimators.hpp"

#include <cmath>

#include "voxtend/error.hpp"

namespace voxtend {

// ---------------------------------------------------------------------------
// Analytic estimator

AnalyticGaussianEstimator::AnalyticGaussianEstimator(FeatureMap mean0,
                                                     double var0,
                                                     NoiseSchedule sched)
    : mean0_(std::move(mean0)), var0_(var0), sched_(std::move(sched)) {
  require(var0_ > 0.0 && std::isfinite(var0_), ErrorCode::kInvalidArgument,
          "analytic estimator needs var0 > 0");
}

FeatureMap AnalyticGaussianEstimator::predict(const FeatureMap& xt,
                                              std::size_t t,
                                              const SpeakerEmbedding*) const {
  require_same_shape(xt, mean0_, "analytic_eps");
  const double ab = sched_.alpha_bar(t);
  const double scale = std::sqrt(1.0 - ab) / (ab * var0_ + 1.0 - ab);
  const double shift = std::sqrt(ab);
  FeatureMap eps = xt;
  auto out = eps.values();
  auto mean = mean0_.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * (out[i] - shift * mean[i]);
  }
  return eps;
}

FeatureMap analytic_eps(const FeatureMap& xt, std::size_t t,
                        const AnalyticGaussianEstimator& est) {
  return est.predict(xt, t, nullptr);
}

// ---------------------------------------------------------------------------
// Small network

NetTensors NetTensors::zeros_like(const NetTensors& other) {
  NetTensors z;
  for (std::size_t i = 0; i < kCount; ++i) {
    z[i] = Eigen::MatrixXd::Zero(other[i].rows(), other[i].cols());
  }
  return z;
}

bool NetTensors::all_finite() const {
  for (const auto& t : tensors) {
    if (!t.allFinite()) return false;
  }
  return true;
}

namespace {

struct TensorGeometry {
  Eigen::Index rows;
  Eigen::Index cols;
  std::size_t fan_in;
};

std::array<TensorGeometry, NetTensors::kCount> geometry(const SmallNetShape& s) {
  const auto p = static_cast<Eigen::Index>(s.input_dim());
  const auto h = static_cast<Eigen::Index>(s.hidden);
  const auto d = static_cast<Eigen::Index>(s.cond_dim);
  const auto td = static_cast<Eigen::Index>(SmallNetShape::kTimeDim);
  return {{
      {h, p, s.input_dim()},              // in.weight
      {h, 1, s.input_dim()},              // in.bias
      {h, td, SmallNetShape::kTimeDim},   // time.weight
      {h, d, s.cond_dim},                 // cond.weight
      {h, 1, s.cond_dim},                 // null_token
      {h, h, s.hidden},                   // mid.weight
      {h, 1, s.hidden},                   // mid.bias
      {p, h, s.hidden},                   // out.weight
      {p, 1, s.hidden},                   // out.bias
  }};
}

void validate_shape(const SmallNetShape& s) {
  require(s.frames >= 1 && s.bins >= 1 && s.hidden >= 1 && s.cond_dim >= 1 &&
              s.steps >= 1,
          ErrorCode::kConfiguration, "small net dimensions must be positive");
}

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& a) {
  return 1.0 / (1.0 + (-a).exp());
}

// Column-batched forward pass with everything the backward pass needs.
struct Activations {
  Eigen::MatrixXd x;      // P x B
  Eigen::MatrixXd time;   // 16 x B
  Eigen::MatrixXd a1, h1, a2, h2, out;
};

Activations forward_batch(const SmallNetEstimator& net, Eigen::MatrixXd x,
                          const std::vector<std::size_t>& steps,
                          const std::vector<const SpeakerEmbedding*>& conds) {
  const auto& p = net.params();
  const Eigen::Index batch = x.cols();
  Activations act;
  act.x = std::move(x);
  act.time.resize(static_cast<Eigen::Index>(SmallNetShape::kTimeDim), batch);
  Eigen::MatrixXd cond_term(static_cast<Eigen::Index>(net.shape().hidden), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto i = static_cast<std::size_t>(b);
    act.time.col(b) = net.time_embedding(steps[i]);
    if (conds[i] != nullptr) {
      Eigen::Map<const Eigen::VectorXd> e(conds[i]->values().data(),
                                          static_cast<Eigen::Index>(conds[i]->dim()));
      cond_term.col(b) = p[NetTensors::kCondW] * e;
    } else {
      cond_term.col(b) = p[NetTensors::kNullToken].col(0);
    }
  }
  act.a1 = p[NetTensors::kInW] * act.x + p[NetTensors::kTimeW] * act.time + cond_term;
  act.a1.colwise() += p[NetTensors::kInB].col(0);
  act.h1 = (act.a1.array() * sigmoid(act.a1.array())).matrix();
  act.a2 = p[NetTensors::kMidW] * act.h1;
  act.a2.colwise() += p[NetTensors::kMidB].col(0);
  act.h2 = (act.a2.array() * sigmoid(act.a2.array())).matrix();
  act.out = p[NetTensors::kOutW] * act.h2;
  act.out.colwise() += p[NetTensors::kOutB].col(0);
  return act;
}

Eigen::MatrixXd silu_grad(const Eigen::MatrixXd& a) {
  const Eigen::ArrayXXd s = sigmoid(a.array());
  return (s * (1.0 + a.array() * (1.0 - s))).matrix();
}

struct PreparedBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd eps;
  std::vector<std::size_t> steps;
  std::vector<const SpeakerEmbedding*> conds;
};

PreparedBatch prepare(const std::vector<TrainItem>& batch,
                      const SmallNetEstimator& net, const NoiseSchedule& sched,
                      DiffusionSeed& seed) {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "empty training batch");
  const auto& shape = net.shape();
  const auto dim = static_cast<Eigen::Index>(shape.input_dim());
  const auto n = static_cast<Eigen::Index>(batch.size());
  PreparedBatch out;
  out.x.resize(dim, n);
  out.eps.resize(dim, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& item = batch[static_cast<std::size_t>(b)];
    require(item.x0.frames() == shape.frames && item.x0.bins() == shape.bins,
            ErrorCode::kConfiguration, "training item does not match net size");
    require(item.t >= 1 && item.t <= shape.steps, ErrorCode::kInvalidArgument,
            "training item step out of range");
    if (item.condition) {
      require(item.condition->dim() == shape.cond_dim,
              ErrorCode::kConfiguration, "condition has wrong dimension");
    }
    NoisedSample s = forward_jump(item.x0, item.t, sched, seed);
    out.x.col(b) = Eigen::Map<const Eigen::VectorXd>(s.xt.values().data(), dim);
    out.eps.col(b) = Eigen::Map<const Eigen::VectorXd>(s.eps.values().data(), dim);
    out.steps.push_back(item.t);
    out.conds.push_back(item.condition ? &*item.condition : nullptr);
  }
  return out;
}

}  // namespace

SmallNetEstimator::SmallNetEstimator(SmallNetShape shape, NetTensors params)
    : shape_(shape), params_(std::move(params)) {
  validate_shape(shape_);
  const auto geo = geometry(shape_);
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    if (params_[i].rows() != geo[i].rows || params_[i].cols() != geo[i].cols) {
      fail(ErrorCode::kConfiguration,
           "tensor " + std::string(NetTensors::kNames[i]) + " has shape " +
               std::to_string(params_[i].rows()) + "x" +
               std::to_string(params_[i].cols()) + ", expected " +
               std::to_string(geo[i].rows) + "x" + std::to_string(geo[i].cols));
    }
  }
  require(params_.all_finite(), ErrorCode::kConfiguration,
          "small net parameters must be finite");

  constexpr std::size_t half = SmallNetShape::kTimeDim / 2;
  time_table_.resize(static_cast<Eigen::Index>(SmallNetShape::kTimeDim),
                     static_cast<Eigen::Index>(shape_.steps));
  for (std::size_t t = 1; t <= shape_.steps; ++t) {
    for (std::size_t j = 0; j < half; ++j) {
      const double freq = std::pow(10000.0, -static_cast<double>(j) / half);
      const double angle = static_cast<double>(t) * freq;
      const auto col = static_cast<Eigen::Index>(t - 1);
      time_table_(static_cast<Eigen::Index>(j), col) = std::sin(angle);
      time_table_(static_cast<Eigen::Index>(j + half), col) = std::cos(angle);
    }
  }
}

SmallNetEstimator SmallNetEstimator::initialize(const SmallNetShape& shape,
                                                DiffusionSeed& seed) {
  validate_shape(shape);
  NetTensors params;
  const auto geo = geometry(shape);
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(geo[i].fan_in));
    params[i].resize(geo[i].rows, geo[i].cols);
    for (Eigen::Index r = 0; r < geo[i].rows; ++r) {
      for (Eigen::Index c = 0; c < geo[i].cols; ++c) {
        params[i](r, c) = (2.0 * seed.uniform() - 1.0) * bound;
      }
    }
  }
  return SmallNetEstimator(shape, std::move(params));
}

SmallNetEstimator SmallNetEstimator::zeros(const SmallNetShape& shape) {
  validate_shape(shape);
  NetTensors params;
  const auto geo = geometry(shape);
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    params[i] = Eigen::MatrixXd::Zero(geo[i].rows, geo[i].cols);
  }
  return SmallNetEstimator(shape, std::move(params));
}

Eigen::VectorXd SmallNetEstimator::time_embedding(std::size_t t) const {
  require(t >= 1 && t <= shape_.steps, ErrorCode::kInvalidArgument,
          "step " + std::to_string(t) + " outside the net's table");
  return time_table_.col(static_cast<Eigen::Index>(t - 1));
}

void SmallNetEstimator::check_input(const FeatureMap& xt, std::size_t t,
                                    const SpeakerEmbedding* condition) const {
  if (xt.frames() != shape_.frames || xt.bins() != shape_.bins) {
    fail(ErrorCode::kConfiguration,
         "net expects " + std::to_string(shape_.frames) + "x" +
             std::to_string(shape_.bins) + " maps, got " +
             std::to_string(xt.frames()) + "x" + std::to_string(xt.bins()));
  }
  require(t >= 1 && t <= shape_.steps, ErrorCode::kInvalidArgument,
          "step " + std::to_string(t) + " outside the net's table");
  if (condition != nullptr && condition->dim() != shape_.cond_dim) {
    fail(ErrorCode::kConfiguration,
         "net expects " + std::to_string(shape_.cond_dim) +
             "-dim conditions, got " + std::to_string(condition->dim()));
  }
}

FeatureMap SmallNetEstimator::predict(const FeatureMap& xt, std::size_t t,
                                      const SpeakerEmbedding* condition) const {
  check_input(xt, t, condition);
  const auto dim = static_cast<Eigen::Index>(shape_.input_dim());
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(xt.values().data(), dim);
  const Activations act = forward_batch(*this, std::move(x), {t}, {condition});
  std::vector<double> out(act.out.data(), act.out.data() + dim);
  return FeatureMap(shape_.frames, shape_.bins, std::move(out));
}

FeatureMap net_forward(const FeatureMap& xt, std::size_t t,
                       const SpeakerEmbedding* e, const SmallNetEstimator& net) {
  return net.predict(xt, t, e);
}

double net_loss(const std::vector<TrainItem>& batch,
                const SmallNetEstimator& net, const NoiseSchedule& sched,
                DiffusionSeed seed) {
  PreparedBatch b = prepare(batch, net, sched, seed);
  const Activations act = forward_batch(net, std::move(b.x), b.steps, b.conds);
  return (act.out - b.eps).squaredNorm() / static_cast<double>(act.out.size());
}

NetGradient net_grad(const std::vector<TrainItem>& batch,
                     const SmallNetEstimator& net, const NoiseSchedule& sched,
                     DiffusionSeed seed) {
  PreparedBatch b = prepare(batch, net, sched, seed);
  const auto& p = net.params();
  const Activations act = forward_batch(net, std::move(b.x), b.steps, b.conds);

  const Eigen::MatrixXd diff = act.out - b.eps;
  const double count = static_cast<double>(diff.size());
  NetGradient g;
  g.loss = diff.squaredNorm() / count;
  g.grads = NetTensors::zeros_like(p);

  const Eigen::MatrixXd d_out = (2.0 / count) * diff;
  g.grads[NetTensors::kOutW] = d_out * act.h2.transpose();
  g.grads[NetTensors::kOutB] = d_out.rowwise().sum();

  const Eigen::MatrixXd d_a2 =
      ((p[NetTensors::kOutW].transpose() * d_out).array() *
       silu_grad(act.a2).array()).matrix();
  g.grads[NetTensors::kMidW] = d_a2 * act.h1.transpose();
  g.grads[NetTensors::kMidB] = d_a2.rowwise().sum();

  const Eigen::MatrixXd d_a1 =
      ((p[NetTensors::kMidW].transpose() * d_a2).array() *
       silu_grad(act.a1).array()).matrix();
  g.grads[NetTensors::kInW] = d_a1 * act.x.transpose();
  g.grads[NetTensors::kInB] = d_a1.rowwise().sum();
  g.grads[NetTensors::kTimeW] = d_a1 * act.time.transpose();

  for (std::size_t i = 0; i < b.conds.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (b.conds[i] != nullptr) {
      Eigen::Map<const Eigen::VectorXd> e(b.conds[i]->values().data(),
                                          static_cast<Eigen::Index>(b.conds[i]->dim()));
      g.grads[NetTensors::kCondW] += d_a1.col(col) * e.transpose();
    } else {
      g.grads[NetTensors::kNullToken] += d_a1.col(col);
    }
  }
  return g;
}

}  // namespace voxtend
