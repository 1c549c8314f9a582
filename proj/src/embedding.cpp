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

#include "voxtend/embedding.hpp"

#include <cmath>
#include <vector>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

constexpr double kUnitNormTolerance = 1e-9;

double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

double exact_sum(std::span<const double> values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  // Round the partials' exact sum to nearest, ties to even.
  std::size_t n = partials.size();
  if (n == 0) return 0.0;
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

SpeakerEmbedding::SpeakerEmbedding(std::vector<double> values)
    : values_(std::move(values)) {
  require(!values_.empty(), ErrorCode::kInvalidArgument,
          "speaker embedding is empty");
  const double norm = l2_norm(values_);
  require(std::fabs(norm - 1.0) <= kUnitNormTolerance,
          ErrorCode::kInvalidArgument,
          "speaker embedding is not unit-norm (norm " + std::to_string(norm) +
              ")");
}

SpeakerEmbedding SpeakerEmbedding::normalized(std::span<const double> raw) {
  const double norm = l2_norm(raw);
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::kDegenerateEmbedding,
          "cannot normalize a zero or non-finite embedding");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= norm;
  return SpeakerEmbedding(std::move(out));
}

double SpeakerEmbedding::dot(const SpeakerEmbedding& other) const {
  require(dim() == other.dim(), ErrorCode::kInvalidArgument,
          "embedding dimensions differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += values_[i] * other.values_[i];
  }
  return acc;
}

ToyEmbedder::ToyEmbedder(std::size_t dim, std::size_t bins,
                         std::vector<double> projection)
    : dim_(dim), bins_(bins), w_(std::move(projection)) {
  require(dim >= 1 && bins >= 1, ErrorCode::kInvalidArgument,
          "embedder needs positive dimensions");
  require(w_.size() == dim * bins, ErrorCode::kInvalidArgument,
          "embedder projection has wrong size");
}

ToyEmbedder ToyEmbedder::identity(std::size_t bins) {
  std::vector<double> w(bins * bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) w[i * bins + i] = 1.0;
  return ToyEmbedder(bins, bins, std::move(w));
}

void ToyEmbedder::check_bins(const FeatureMap& x) const {
  if (x.bins() != bins_ || x.frames() == 0) {
    fail(ErrorCode::kInvalidArgument,
         "embedder expects " + std::to_string(bins_) + " bins, got " +
             std::to_string(x.bins()));
  }
}

std::vector<double> ToyEmbedder::pool(const FeatureMap& x) const {
  check_bins(x);
  std::vector<double> column(x.frames());
  std::vector<double> pooled(bins_);
  for (std::size_t m = 0; m < bins_; ++m) {
    for (std::size_t f = 0; f < x.frames(); ++f) column[f] = x(f, m);
    pooled[m] = exact_sum(column) / static_cast<double>(x.frames());
  }
  return pooled;
}

std::vector<double> ToyEmbedder::project(std::span<const double> pooled) const {
  require(pooled.size() == bins_, ErrorCode::kInvalidArgument,
          "pooled vector has wrong length");
  std::vector<double> u(dim_, 0.0);
  for (std::size_t d = 0; d < dim_; ++d) {
    double acc = 0.0;
    for (std::size_t m = 0; m < bins_; ++m) acc += w_[d * bins_ + m] * pooled[m];
    u[d] = acc;
  }
  return u;
}

SpeakerEmbedding ToyEmbedder::embed(const FeatureMap& x) const {
  const auto u = project(pool(x));
  return SpeakerEmbedding::normalized(u);
}

FeatureMap ToyEmbedder::embed_grad(const FeatureMap& x,
                                   const SpeakerEmbedding& e) const {
  require(e.dim() == dim_, ErrorCode::kInvalidArgument,
          "reference embedding has wrong dimension");
  const auto u = project(pool(x));
  const double norm = l2_norm(u);
  require(norm > 0.0, ErrorCode::kDegenerateEmbedding,
          "pooled projection is zero");
  double sim = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) sim += u[d] / norm * e[d];
  // d(f.e)/du = (e - (f.e) f) / |u|
  std::vector<double> du(dim_);
  for (std::size_t d = 0; d < dim_; ++d) du[d] = (e[d] - sim * u[d] / norm) / norm;
  std::vector<double> dp(bins_, 0.0);
  for (std::size_t d = 0; d < dim_; ++d) {
    for (std::size_t m = 0; m < bins_; ++m) dp[m] += w_[d * bins_ + m] * du[d];
  }
  const double inv_frames = 1.0 / static_cast<double>(x.frames());
  FeatureMap grad(x.frames(), bins_);
  for (std::size_t f = 0; f < x.frames(); ++f) {
    for (std::size_t m = 0; m < bins_; ++m) grad(f, m) = dp[m] * inv_frames;
  }
  return grad;
}

}  // namespace voxtend
