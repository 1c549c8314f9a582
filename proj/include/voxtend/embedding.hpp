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
#include <span>
#include <vector>

#include "voxtend/feature_map.hpp"

namespace voxtend {

/// Unit-norm speaker embedding. The constructor rejects vectors whose L2
/// norm differs from 1 by more than 1e-9.
class SpeakerEmbedding {
 public:
  SpeakerEmbedding() = default;
  explicit SpeakerEmbedding(std::vector<double> values);

  /// Scales `raw` to unit norm; throws kDegenerateEmbedding on zero input.
  static SpeakerEmbedding normalized(std::span<const double> raw);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double dot(const SpeakerEmbedding& other) const;

  friend bool operator==(const SpeakerEmbedding&,
                         const SpeakerEmbedding&) = default;

 private:
  std::vector<double> values_;
};

/// f_phi: maps a feature map to a speaker embedding and exposes the gradient
/// of its similarity to a reference embedding.
class DifferentiableEmbedder {
 public:
  virtual ~DifferentiableEmbedder() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t bins() const = 0;
  virtual SpeakerEmbedding embed(const FeatureMap& x) const = 0;
  /// Gradient of embed(x) . e with respect to every element of x.
  virtual FeatureMap embed_grad(const FeatureMap& x,
                                const SpeakerEmbedding& e) const = 0;
};

/// normalize(W * meanpool_over_frames(x)).
///
/// The frame mean is accumulated with correctly rounded summation, so
/// pooling a map concatenated with itself yields bit-identical output.
class ToyEmbedder final : public DifferentiableEmbedder {
 public:
  /// `projection` is row-major dim x bins.
  ToyEmbedder(std::size_t dim, std::size_t bins, std::vector<double> projection);

  static ToyEmbedder identity(std::size_t bins);

  std::size_t dim() const override { return dim_; }
  std::size_t bins() const override { return bins_; }
  std::span<const double> projection() const noexcept { return w_; }

  SpeakerEmbedding embed(const FeatureMap& x) const override;
  FeatureMap embed_grad(const FeatureMap& x,
                        const SpeakerEmbedding& e) const override;

  /// Frame-mean of `x` (length bins()).
  std::vector<double> pool(const FeatureMap& x) const;
  /// W * pooled, before normalization.
  std::vector<double> project(std::span<const double> pooled) const;

 private:
  void check_bins(const FeatureMap& x) const;

  std::size_t dim_;
  std::size_t bins_;
  std::vector<double> w_;
};

/// Correctly rounded sum of `values` (Shewchuk's exact partials).
double exact_sum(std::span<const double> values);

}  // namespace voxtend
