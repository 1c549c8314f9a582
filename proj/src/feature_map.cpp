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

#include "voxtend/feature_map.hpp"

#include <algorithm>
#include <cmath>

#include "voxtend/error.hpp"

namespace voxtend {

FeatureMap::FeatureMap(std::size_t frames, std::size_t bins, double fill)
    : frames_(frames), bins_(bins), values_(frames * bins, fill) {
  require(frames >= 1 && bins >= 1, ErrorCode::kInvalidArgument,
          "feature map needs at least one frame and one bin");
}

FeatureMap::FeatureMap(std::size_t frames, std::size_t bins,
                       std::vector<double> values)
    : frames_(frames), bins_(bins), values_(std::move(values)) {
  require(frames >= 1 && bins >= 1, ErrorCode::kInvalidArgument,
          "feature map needs at least one frame and one bin");
  require(values_.size() == frames * bins, ErrorCode::kInvalidArgument,
          "feature map holds " + std::to_string(values_.size()) +
              " values, expected " + std::to_string(frames * bins));
}

bool FeatureMap::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_shape(const FeatureMap& a, const FeatureMap& b,
                        const std::string& what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kInvalidArgument,
         what + ": shape mismatch " + std::to_string(a.frames()) + "x" +
             std::to_string(a.bins()) + " vs " + std::to_string(b.frames()) +
             "x" + std::to_string(b.bins()));
  }
}

FeatureMap concat_frames(const FeatureMap& head, const FeatureMap& tail) {
  require(head.bins() == tail.bins(), ErrorCode::kInvalidArgument,
          "concat_frames: bin counts differ");
  std::vector<double> values;
  values.reserve(head.size() + tail.size());
  values.insert(values.end(), head.values().begin(), head.values().end());
  values.insert(values.end(), tail.values().begin(), tail.values().end());
  return FeatureMap(head.frames() + tail.frames(), head.bins(),
                    std::move(values));
}

FeatureMap slice_frames(const FeatureMap& x, std::size_t first,
                        std::size_t count) {
  require(count >= 1 && first + count <= x.frames(),
          ErrorCode::kInvalidArgument, "slice_frames: range out of bounds");
  auto begin = x.values().begin() + static_cast<std::ptrdiff_t>(first * x.bins());
  auto end = begin + static_cast<std::ptrdiff_t>(count * x.bins());
  return FeatureMap(count, x.bins(), std::vector<double>(begin, end));
}

}  // namespace voxtend
