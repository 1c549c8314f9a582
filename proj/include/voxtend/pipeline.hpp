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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voxtend/diffusion.hpp"
#include "voxtend/embedding.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/guidance.hpp"
#include "voxtend/rng.hpp"
#include "voxtend/sv_eval.hpp"

namespace voxtend {

enum class ConditionKind { kBaseline, kDm, kDmPlus, kDuplicate };

ConditionKind parse_condition_kind(std::string_view name);
std::string_view to_string(ConditionKind kind);

struct Condition {
  ConditionKind kind = ConditionKind::kBaseline;
  double clip_duration = 0.5;  // seconds
  double gen_duration = 0.0;   // seconds, dm / dm_plus only

  void validate() const;
  bool generates() const noexcept {
    return kind == ConditionKind::kDm || kind == ConditionKind::kDmPlus;
  }
  /// Stable identifier such as "dm_plus@0.5+1" used for seeds and caching.
  std::string key() const;
};

struct UtteranceRecord {
  std::string id;
  FeatureMap features;
  SpeakerEmbedding embedding;
};

/// round(duration / frame_shift), at least 1.
std::size_t duration_frames(double duration, double frame_shift);

/// Contiguous slice of round(duration / frame_shift) frames starting at an
/// offset drawn uniformly from all valid positions.
FeatureMap clip(const FeatureMap& features, double duration, double frame_shift,
                DiffusionSeed& seed);

/// Everything needed to generate features for one utterance.
struct ExtendContext {
  const DifferentiableEmbedder* embedder = nullptr;
  /// One generator per output frame count (F_out).
  std::vector<const NoiseEstimator*> generators;
  const NoiseSchedule* schedule = nullptr;
  GuidanceMode mode = GuidanceMode::kBuiltin;
  double scale = 3.0;
  double frame_shift = 0.010;

  const NoiseEstimator& generator_for(std::size_t frames) const;
};

/// baseline: original; dm: generated only; dm_plus: original then generated;
/// duplicate: original then original. Generation is guided by
/// e = embed(original).
FeatureMap extend(const FeatureMap& original, const Condition& cond,
                  const ExtendContext& ctx, DiffusionSeed& seed);

struct ProtocolConfig {
  std::uint64_t master_seed = 0;
  bool extend_enroll = true;  // false: only the test side is extended
  std::size_t threads = 1;
  /// When set, extended maps are stored/reused under
  /// <cache_dir>/<condition hash>/<utterance>.fbank.
  std::optional<std::filesystem::path> cache_dir;
  /// Folded into the cache hash; identifies the models behind ctx.
  std::string model_tag;
};

struct ResultRow {
  std::string condition;
  double clip_s = 0.0;
  double gen_s = 0.0;
  double eer = 0.0;
  double mindcf = 0.0;
  std::size_t n_trials = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct EmbeddingRow {
  std::string condition;
  std::string form;  // "clipped" or "extended"
  std::string utterance;
  SpeakerEmbedding embedding;
};

struct ProtocolOutput {
  std::vector<ResultRow> rows;
  std::vector<ScoreSet> scores;  // parallel to rows, in trial order
  std::vector<EmbeddingRow> embeddings;
};

/// Per-utterance seeds are derived from (master seed, utterance id, clip
/// length) for clipping and (master seed, utterance id, condition) for
/// generation, so every condition scores the same clips and the result does
/// not depend on thread count.
ProtocolOutput run_protocol(const std::vector<Trial>& trials,
                            const std::map<std::string, FeatureMap>& utterances,
                            const std::vector<Condition>& conditions,
                            const ExtendContext& ctx,
                            const ProtocolConfig& config);

/// "condition,clip_s,gen_s,eer,mindcf,n_trials" table.
std::string results_csv(const std::vector<ResultRow>& rows);

/// "condition,form,utterance,e0,...": one line per embedded utterance.
std::string embeddings_csv(const std::vector<EmbeddingRow>& rows);

}  // namespace voxtend
