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

#include "voxtend/toy_world.hpp"

#include <cmath>
#include <limits>

#include "voxtend/error.hpp"

namespace voxtend {

ToyWorld::ToyWorld(const ToyWorldSpec& spec) : spec_(spec) {
  require(spec.speakers >= 1 && spec.frames >= 1 && spec.bins >= 1,
          ErrorCode::kConfiguration, "toy world dimensions must be positive");
  require(spec.spread > 0.0 && spec.frame_std >= 0.0 && spec.session_std >= 0.0,
          ErrorCode::kConfiguration, "toy world spreads must be nonnegative");
  DiffusionSeed seed(spec.seed);
  patterns_.assign(spec.speakers, std::vector<double>(spec.bins));
  for (auto& pattern : patterns_) {
    for (double& v : pattern) v = spec.spread * seed.normal();
  }
}

FeatureMap ToyWorld::mean_map(std::size_t speaker) const {
  const auto& p = pattern(speaker);
  FeatureMap x(spec_.frames, spec_.bins);
  for (std::size_t f = 0; f < spec_.frames; ++f) {
    for (std::size_t m = 0; m < spec_.bins; ++m) x(f, m) = p[m];
  }
  return x;
}

FeatureMap ToyWorld::utterance(std::size_t speaker, std::size_t frames,
                               DiffusionSeed& seed) const {
  const auto& p = pattern(speaker);
  std::vector<double> offset(spec_.bins);
  for (double& v : offset) v = spec_.session_std * seed.normal();
  FeatureMap x(frames, spec_.bins);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t m = 0; m < spec_.bins; ++m) {
      x(f, m) = p[m] + offset[m] + spec_.frame_std * seed.normal();
    }
  }
  return x;
}

std::size_t ToyWorld::nearest_speaker(const FeatureMap& x) const {
  require(x.bins() == spec_.bins, ErrorCode::kInvalidArgument,
          "nearest_speaker: bin count mismatch");
  std::vector<double> mean(spec_.bins, 0.0);
  for (std::size_t f = 0; f < x.frames(); ++f) {
    for (std::size_t m = 0; m < spec_.bins; ++m) mean[m] += x(f, m);
  }
  for (double& v : mean) v /= static_cast<double>(x.frames());
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    double d = 0.0;
    for (std::size_t m = 0; m < spec_.bins; ++m) {
      const double diff = mean[m] - patterns_[k][m];
      d += diff * diff;
    }
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

ToyDataset::ToyDataset(ToyWorld world, const DifferentiableEmbedder& embedder)
    : world_(std::move(world)) {
  require(embedder.bins() == world_.spec().bins, ErrorCode::kConfiguration,
          "embedder bins do not match the toy world");
  for (std::size_t k = 0; k < world_.speakers(); ++k) {
    references_.push_back(embedder.embed(world_.mean_map(k)));
  }
}

ToyDataset::Draw ToyDataset::draw(DiffusionSeed& seed) const {
  const auto k = static_cast<std::size_t>(seed.below(world_.speakers()));
  return {world_.utterance(k, world_.spec().frames, seed), k};
}

ToyEmbedder make_toy_embedder(std::size_t dim, std::size_t bins,
                              std::uint64_t seed) {
  DiffusionSeed rng(seed);
  std::vector<double> w(dim * bins);
  const double scale = 1.0 / std::sqrt(static_cast<double>(bins));
  for (double& v : w) v = scale * rng.normal();
  return ToyEmbedder(dim, bins, std::move(w));
}

}  // namespace voxtend
