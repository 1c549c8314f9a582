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
#include <string_view>
#include <vector>

#include "voxtend/embedding.hpp"

namespace voxtend {

enum class TrialLabel { kDifferent = 0, kSame = 1 };

struct Trial {
  std::string enroll;
  std::string test;
  TrialLabel label = TrialLabel::kDifferent;

  friend bool operator==(const Trial&, const Trial&) = default;
};

/// Parses "<0|1> <enroll> <test>" lines; blank lines are skipped. Malformed
/// lines raise kFormat with the 1-based line number.
std::vector<Trial> load_trials(std::string_view text);

struct ScoreSet {
  std::vector<double> scores;
  std::vector<TrialLabel> labels;

  void add(double score, TrialLabel label) {
    scores.push_back(score);
    labels.push_back(label);
  }
  std::size_t size() const noexcept { return scores.size(); }
};

/// Dot product of two unit vectors; kInvalidArgument if either norm is off by
/// more than 1e-6.
double cosine_score(std::span<const double> a, std::span<const double> b);
double cosine_score(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

/// Miss/false-alarm rates at threshold theta with the rule
/// "accept iff score >= theta".
struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

/// Operating points at every distinct score, ascending, followed by +inf.
std::vector<OperatingPoint> operating_points(const ScoreSet& s);

/// Equal error rate, linearly interpolated between the adjacent operating
/// points that bracket P_miss = P_fa.
double eer(const ScoreSet& s);

/// min over thresholds of c_fr p_target P_miss + c_fa (1 - p_target) P_fa,
/// divided by min(c_fr p_target, c_fa (1 - p_target)).
double min_dcf(const ScoreSet& s, double p_target = 0.01, double c_fa = 1.0,
               double c_fr = 1.0);

/// Parses a score CSV: "<score>,<label>" per line with label 0/1 (or
/// nontarget/target). A non-numeric first line is treated as a header.
ScoreSet parse_score_csv(std::string_view text);

}  // namespace voxtend
