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

#include "voxtend/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "voxtend/error.hpp"
#include "voxtend/formats.hpp"

namespace voxtend {

ConditionKind parse_condition_kind(std::string_view name) {
  if (name == "baseline") return ConditionKind::kBaseline;
  if (name == "dm") return ConditionKind::kDm;
  if (name == "dm_plus" || name == "dm+") return ConditionKind::kDmPlus;
  if (name == "duplicate") return ConditionKind::kDuplicate;
  fail(ErrorCode::kInvalidArgument, "unknown condition kind '" + std::string(name) + "'");
}

std::string_view to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kBaseline: return "baseline";
    case ConditionKind::kDm: return "dm";
    case ConditionKind::kDmPlus: return "dm_plus";
    case ConditionKind::kDuplicate: return "duplicate";
  }
  return "unknown";
}

void Condition::validate() const {
  require(clip_duration > 0.0 && std::isfinite(clip_duration),
          ErrorCode::kConfiguration, "clip duration must be positive");
  if (generates()) {
    require(gen_duration > 0.0 && std::isfinite(gen_duration),
            ErrorCode::kConfiguration, "generated duration must be positive");
  }
}

std::string Condition::key() const {
  std::string k = std::string(to_string(kind)) + "@" + format_decimal(clip_duration);
  if (generates()) k += "+" + format_decimal(gen_duration);
  return k;
}

std::size_t duration_frames(double duration, double frame_shift) {
  require(duration > 0.0 && frame_shift > 0.0, ErrorCode::kInvalidArgument,
          "durations must be positive");
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(duration / frame_shift)));
}

FeatureMap clip(const FeatureMap& features, double duration, double frame_shift,
                DiffusionSeed& seed) {
  const std::size_t n = duration_frames(duration, frame_shift);
  if (n > features.frames()) {
    fail(ErrorCode::kShortUtterance,
         "utterance has " + std::to_string(features.frames()) +
             " frames, clip needs " + std::to_string(n));
  }
  const auto offset = static_cast<std::size_t>(seed.below(features.frames() - n + 1));
  return slice_frames(features, offset, n);
}

const NoiseEstimator& ExtendContext::generator_for(std::size_t frames) const {
  for (const auto* g : generators) {
    if (g != nullptr && g->frames() == frames) return *g;
  }
  fail(ErrorCode::kConfiguration,
       "no generator produces " + std::to_string(frames) + " frames");
}

FeatureMap extend(const FeatureMap& original, const Condition& cond,
                  const ExtendContext& ctx, DiffusionSeed& seed) {
  cond.validate();
  switch (cond.kind) {
    case ConditionKind::kBaseline:
      return original;
    case ConditionKind::kDuplicate:
      return concat_frames(original, original);
    case ConditionKind::kDm:
    case ConditionKind::kDmPlus:
      break;
  }
  require(ctx.embedder != nullptr && ctx.schedule != nullptr,
          ErrorCode::kConfiguration, "generation needs an embedder and a schedule");
  const std::size_t frames = duration_frames(cond.gen_duration, ctx.frame_shift);
  const NoiseEstimator& generator = ctx.generator_for(frames);
  const SpeakerEmbedding e = ctx.embedder->embed(original);
  GuidanceConfig guidance{ctx.mode, ctx.scale, frames, {}};
  FeatureMap generated =
      ctx.mode == GuidanceMode::kExternal
          ? sample_external(e, guidance, generator, *ctx.embedder, *ctx.schedule, seed)
          : sample_builtin(e, guidance, generator, *ctx.schedule, seed);
  if (cond.kind == ConditionKind::kDm) return generated;
  return concat_frames(original, generated);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cache_file_name(const std::string& id) {
  std::string safe;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    safe += ok ? c : '_';
  }
  return safe + "-" + hex64(DiffusionSeed::derive(0, id)).substr(0, 8) + ".fbank";
}

struct Job {
  std::string id;
  bool extended = false;
  SpeakerEmbedding embedding;
};

}  // namespace

ProtocolOutput run_protocol(const std::vector<Trial>& trials,
                            const std::map<std::string, FeatureMap>& utterances,
                            const std::vector<Condition>& conditions,
                            const ExtendContext& ctx,
                            const ProtocolConfig& config) {
  require(!trials.empty(), ErrorCode::kConfiguration, "trial list is empty");
  require(ctx.embedder != nullptr, ErrorCode::kConfiguration,
          "protocol needs an embedder");
  for (const auto& c : conditions) c.validate();
  for (const auto& t : trials) {
    for (const auto* id : {&t.enroll, &t.test}) {
      if (!utterances.contains(*id)) {
        fail(ErrorCode::kConfiguration, "utterance '" + *id + "' is not available");
      }
    }
  }

  ProtocolOutput output;
  for (const auto& cond : conditions) {
    // Unique (utterance, extended?) pairs needed by this condition.
    std::set<std::pair<std::string, bool>> needed;
    for (const auto& t : trials) {
      needed.insert({t.enroll, config.extend_enroll});
      needed.insert({t.test, true});
    }
    std::vector<Job> jobs;
    for (const auto& [id, extended] : needed) jobs.push_back({id, extended, {}});

    std::optional<std::filesystem::path> cache;
    if (config.cache_dir) {
      const std::string tag = cond.key() + "|" + std::to_string(config.master_seed) +
                              "|" + std::string(to_string(ctx.mode)) + "|" +
                              format_decimal(ctx.scale) + "|" +
                              format_decimal(ctx.frame_shift) + "|" + config.model_tag;
      cache = *config.cache_dir / hex64(DiffusionSeed::derive(0, tag));
    }

    const Condition baseline{ConditionKind::kBaseline, cond.clip_duration, 0.0};
    auto run_job = [&](Job& job) {
      const Condition& applied = job.extended ? cond : baseline;
      std::optional<std::filesystem::path> cached;
      if (cache) {
        cached = *cache / ((job.extended ? "" : "clip-") + cache_file_name(job.id));
      }
      FeatureMap features;
      if (cached && std::filesystem::exists(*cached)) {
        features = parse_feature_map(read_text_file(*cached));
      } else {
        const FeatureMap& source = utterances.at(job.id);
        const std::size_t clip_frames =
            duration_frames(cond.clip_duration, ctx.frame_shift);
        DiffusionSeed clip_seed(DiffusionSeed::derive(
            config.master_seed, "clip|" + job.id + "|" + std::to_string(clip_frames)));
        FeatureMap clipped = clip(source, cond.clip_duration, ctx.frame_shift, clip_seed);
        DiffusionSeed gen_seed(DiffusionSeed::derive(
            config.master_seed, "extend|" + job.id + "|" + applied.key()));
        features = extend(clipped, applied, ctx, gen_seed);
        if (cached) write_text_file(*cached, serialize_feature_map(features));
      }
      job.embedding = ctx.embedder->embed(features);
    };

    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::string failed_id;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          run_job(jobs[i]);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error || jobs[i].id < failed_id) {
            first_error = std::current_exception();
            failed_id = jobs[i].id;
          }
        }
      }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, jobs.size()));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (first_error) {
      const std::string where =
          "condition " + cond.key() + ", utterance '" + failed_id + "': ";
      try {
        std::rethrow_exception(first_error);
      } catch (const Error& e) {
        throw Error(e.code(), where + e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, where + e.what());
      }
    }

    std::map<std::pair<std::string, bool>, const SpeakerEmbedding*> lookup;
    for (const auto& job : jobs) lookup[{job.id, job.extended}] = &job.embedding;

    ScoreSet scores;
    for (const auto& t : trials) {
      const auto& enroll = *lookup.at({t.enroll, config.extend_enroll});
      const auto& test = *lookup.at({t.test, true});
      scores.add(cosine_score(enroll, test), t.label);
    }
    const std::string name(to_string(cond.kind));
    for (const auto& job : jobs) {
      output.embeddings.push_back(
          {cond.key(), job.extended ? "extended" : "clipped", job.id, job.embedding});
    }
    output.rows.push_back({name, cond.clip_duration,
                           cond.generates() ? cond.gen_duration : 0.0, eer(scores),
                           min_dcf(scores, 0.01, 1.0, 1.0), trials.size()});
    output.scores.push_back(std::move(scores));
  }
  return output;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = "condition,clip_s,gen_s,eer,mindcf,n_trials\n";
  for (const auto& r : rows) {
    out += r.condition + "," + format_decimal(r.clip_s) + "," + format_decimal(r.gen_s) +
           "," + format_decimal(r.eer) + "," + format_decimal(r.mindcf) + "," +
           std::to_string(r.n_trials) + "\n";
  }
  return out;
}

std::string embeddings_csv(const std::vector<EmbeddingRow>& rows) {
  std::string out = "condition,form,utterance";
  const std::size_t dim = rows.empty() ? 0 : rows.front().embedding.dim();
  for (std::size_t i = 0; i < dim; ++i) out += ",e" + std::to_string(i);
  out += "\n";
  for (const auto& r : rows) {
    out += r.condition + "," + r.form + "," + r.utterance;
    for (double v : r.embedding.values()) out += "," + format_decimal(v);
    out += "\n";
  }
  return out;
}

}  // namespace voxtend
