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

#include <cstdint>
#include <random>
#include <string_view>

namespace voxtend {

/// Seeded random stream used by every stochastic operation.
///
/// Gaussian and bounded-integer draws are computed here rather than through
/// std::normal_distribution / std::uniform_int_distribution, whose output is
/// implementation-defined; this keeps checkpoints and sampled features
/// identical across standard libraries. A single instance must not be shared
/// between threads.
class DiffusionSeed {
 public:
  explicit DiffusionSeed(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Raw 64-bit draw.
  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal draw (Box-Muller, second variate cached).
  double normal();

  /// Deterministic child seed derived from a master seed and a label, used to
  /// give each utterance/condition its own stream independent of call order.
  static std::uint64_t derive(std::uint64_t master, std::string_view label);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace voxtend
