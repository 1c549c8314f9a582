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

#include "voxtend/sv_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

constexpr double kCosineNormTolerance = 1e-6;

std::vector<std::string_view> split_fields(std::string_view line,
                                           std::string_view separators) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t start = line.find_first_not_of(separators, pos);
    if (start == std::string_view::npos) break;
    const std::size_t end = line.find_first_of(separators, start);
    fields.push_back(line.substr(start, end - start));
    pos = end == std::string_view::npos ? line.size() : end;
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && p == text.data() + text.size();
}

struct LabelCounts {
  std::size_t same = 0;
  std::size_t different = 0;
};

LabelCounts count_labels(const ScoreSet& s) {
  require(s.scores.size() == s.labels.size(), ErrorCode::kInvalidArgument,
          "scores and labels differ in length");
  for (double v : s.scores) {
    require(std::isfinite(v), ErrorCode::kInvalidArgument, "scores must be finite");
  }
  LabelCounts c;
  for (auto label : s.labels) {
    (label == TrialLabel::kSame ? c.same : c.different) += 1;
  }
  require(c.same > 0 && c.different > 0, ErrorCode::kInvalidArgument,
          "metrics need at least one same-speaker and one different-speaker "
          "trial");
  return c;
}

}  // namespace

std::vector<Trial> load_trials(std::string_view text) {
  std::vector<Trial> trials;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line, " \t\r");
    if (fields.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (fields.size() != 3 || (fields[0] != "0" && fields[0] != "1")) {
      fail(ErrorCode::kFormat, "trial list line " + std::to_string(line_no) +
                                   ": expected '<0|1> <enroll> <test>'");
    }
    trials.push_back({std::string(fields[1]), std::string(fields[2]),
                      fields[0] == "1" ? TrialLabel::kSame : TrialLabel::kDifferent});
    if (end == text.size()) break;
  }
  return trials;
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kInvalidArgument,
          "cosine_score: dimensions differ");
  double na = 0.0, nb = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
    dot += a[i] * b[i];
  }
  require(std::fabs(std::sqrt(na) - 1.0) <= kCosineNormTolerance &&
              std::fabs(std::sqrt(nb) - 1.0) <= kCosineNormTolerance,
          ErrorCode::kInvalidArgument, "cosine_score: inputs must be unit-norm");
  return dot;
}

double cosine_score(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  return cosine_score(a.values(), b.values());
}

std::vector<OperatingPoint> operating_points(const ScoreSet& s) {
  const LabelCounts counts = count_labels(s);
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });
  const auto n_same = static_cast<double>(counts.same);
  const auto n_diff = static_cast<double>(counts.different);
  std::vector<OperatingPoint> points;
  std::size_t same_below = 0;
  std::size_t diff_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double theta = s.scores[order[i]];
    points.push_back({theta, static_cast<double>(same_below) / n_same,
                      static_cast<double>(counts.different - diff_below) / n_diff});
    for (; i < order.size() && s.scores[order[i]] == theta; ++i) {
      (s.labels[order[i]] == TrialLabel::kSame ? same_below : diff_below) += 1;
    }
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return points;
}

double eer(const ScoreSet& s) {
  const auto points = operating_points(s);
  // The first point accepts everything (P_fa = 1 > P_miss = 0) and the last
  // rejects everything, so a crossing always exists.
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& hi = points[i];
    if (hi.p_miss < hi.p_fa) continue;
    if (hi.p_miss == hi.p_fa) return hi.p_miss;
    const auto& lo = points[i - 1];
    const double below = lo.p_fa - lo.p_miss;
    const double above = hi.p_miss - hi.p_fa;
    const double lambda = below / (below + above);
    return lo.p_miss + lambda * (hi.p_miss - lo.p_miss);
  }
  return points.back().p_miss;
}

double min_dcf(const ScoreSet& s, double p_target, double c_fa, double c_fr) {
  require(p_target > 0.0 && p_target < 1.0, ErrorCode::kInvalidArgument,
          "p_target must lie in (0, 1)");
  require(c_fa > 0.0 && c_fr > 0.0, ErrorCode::kInvalidArgument,
          "detection costs must be positive");
  const double miss_weight = c_fr * p_target;
  const double fa_weight = c_fa * (1.0 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : operating_points(s)) {
    best = std::min(best, miss_weight * p.p_miss + fa_weight * p.p_fa);
  }
  return best / std::min(miss_weight, fa_weight);
}

ScoreSet parse_score_csv(std::string_view text) {
  ScoreSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first_content = true;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line, ", \t\r");
    if (fields.empty()) continue;
    double score = 0.0;
    const bool numeric = fields.size() >= 1 && parse_double(fields[0], score);
    if (first_content && !numeric) {
      first_content = false;
      continue;  // header
    }
    first_content = false;
    if (fields.size() != 2 || !numeric) {
      fail(ErrorCode::kFormat, "score csv line " + std::to_string(line_no) +
                                   ": expected '<score>,<label>'");
    }
    if (fields[1] == "1" || fields[1] == "target") {
      set.add(score, TrialLabel::kSame);
    } else if (fields[1] == "0" || fields[1] == "nontarget") {
      set.add(score, TrialLabel::kDifferent);
    } else {
      fail(ErrorCode::kFormat, "score csv line " + std::to_string(line_no) +
                                   ": label must be 0/1 or target/nontarget");
    }
  }
  return set;
}

}  // namespace voxtend
