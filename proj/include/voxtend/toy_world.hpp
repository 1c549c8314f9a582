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
#include <cstdint>
#include <vector>

#include "voxtend/embedding.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/rng.hpp"

namespace voxtend {

/// Synthetic "speakers": each owns a spectral pattern (one value per bin)
/// that is repeated across frames. An utterance adds a per-utterance session
/// offset and independent per-element noise to that pattern.
struct ToyWorldSpec {
  std::size_t speakers = 2;
  std::size_t frames = 8;
  std::size_t bins = 8;
  double spread = 1.0;       // std of pattern entries
  double frame_std = 0.3;    // per-element noise
  double session_std = 0.0;  // per-utterance, per-bin offset
  std::uint64_t seed = 7;
};

class ToyWorld {
 public:
  explicit ToyWorld(const ToyWorldSpec& spec);

  const ToyWorldSpec& spec() const noexcept { return spec_; }
  std::size_t speakers() const noexcept { return patterns_.size(); }
  const std::vector<double>& pattern(std::size_t speaker) const {
    return patterns_.at(speaker);
  }

  /// Pattern tiled over spec().frames frames: the cluster mean.
  FeatureMap mean_map(std::size_t speaker) const;

  FeatureMap utterance(std::size_t speaker, std::size_t frames,
                       DiffusionSeed& seed) const;

  /// Speaker whose cluster mean is nearest to `x` in Euclidean distance over
  /// the frame-mean (equivalently the full map when frames match).
  std::size_t nearest_speaker(const FeatureMap& x) const;

 private:
  ToyWorldSpec spec_;
  std::vector<std::vector<double>> patterns_;
};

/// Training pairs (x0, e) drawn from a ToyWorld, each speaker's reference
/// embedding being embed(cluster mean).
class ToyDataset {
 public:
  ToyDataset(ToyWorld world, const DifferentiableEmbedder& embedder);

  const ToyWorld& world() const noexcept { return world_; }
  std::size_t speakers() const noexcept { return world_.speakers(); }
  const SpeakerEmbedding& reference(std::size_t speaker) const {
    return references_.at(speaker);
  }

  struct Draw {
    FeatureMap x0;
    std::size_t speaker;
  };
  Draw draw(DiffusionSeed& seed) const;

 private:
  ToyWorld world_;
  std::vector<SpeakerEmbedding> references_;
};

/// Random Gaussian projection (entries N(0, 1/bins)) seeded deterministically.
ToyEmbedder make_toy_embedder(std::size_t dim, std::size_t bins,
                              std::uint64_t seed);

}  // namespace voxtend
