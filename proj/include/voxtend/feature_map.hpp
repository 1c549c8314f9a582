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
#include <string>
#include <vector>

namespace voxtend {

/// Frames x bins matrix of real values, stored row-major (one row per frame).
/// This is the sample space of the diffusion process and the output of the
/// filterbank front-end.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t frames, std::size_t bins, double fill = 0.0);
  FeatureMap(std::size_t frames, std::size_t bins, std::vector<double> values);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t frame, std::size_t bin) {
    return values_[frame * bins_ + bin];
  }
  double operator()(std::size_t frame, std::size_t bin) const {
    return values_[frame * bins_ + bin];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t frame) const {
    return std::span<const double>(values_).subspan(frame * bins_, bins_);
  }

  bool same_shape(const FeatureMap& other) const noexcept {
    return frames_ == other.frames_ && bins_ == other.bins_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> values_;
};

/// Throws kInvalidArgument naming `what` when the shapes differ.
void require_same_shape(const FeatureMap& a, const FeatureMap& b,
                        const std::string& what);

/// Stacks `tail` below `head` along the frame axis.
FeatureMap concat_frames(const FeatureMap& head, const FeatureMap& tail);

/// Frames [first, first + count) of `x`.
FeatureMap slice_frames(const FeatureMap& x, std::size_t first,
                        std::size_t count);

}  // namespace voxtend
