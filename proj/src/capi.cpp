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
#include "voxtend/voxtend.h"

#include <cstring>
#include <exception>
#include <map>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "voxtend/audio.hpp"
#include "voxtend/diffusion.hpp"
#include "voxtend/embedding.hpp"
#include "voxtend/error.hpp"
#include "voxtend/estimators.hpp"
#include "voxtend/feature_map.hpp"
#include "voxtend/formats.hpp"
#include "voxtend/guidance.hpp"
#include "voxtend/pipeline.hpp"
#include "voxtend/rng.hpp"
#include "voxtend/sv_eval.hpp"
#include "voxtend/toy_world.hpp"
#include "voxtend/training.hpp"

struct vx_fmap {
  voxtend::FeatureMap value;
};

struct vx_schedule {
  voxtend::NoiseSchedule value;
};

struct vx_embedder {
  voxtend::ToyEmbedder value;
};

struct vx_net {
  voxtend::SmallNetEstimator value;
};

struct vx_protocol {
  std::vector<voxtend::Trial> trials;
  std::map<std::string, voxtend::FeatureMap> utterances;
  std::vector<voxtend::Condition> conditions;
  std::vector<voxtend::SmallNetEstimator> generators;
  std::optional<voxtend::ToyEmbedder> embedder;
  std::optional<voxtend::NoiseSchedule> schedule;
  voxtend::ProtocolOutput output;
  std::string results_csv;
  std::string embeddings_csv;
};

namespace {

using voxtend::ErrorCode;

thread_local std::string g_last_error;

int to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return VX_ERR_INVALID_ARGUMENT;
    case ErrorCode::kConfiguration: return VX_ERR_CONFIGURATION;
    case ErrorCode::kFormat: return VX_ERR_FORMAT;
    case ErrorCode::kDivisionByZero: return VX_ERR_DIVISION_BY_ZERO;
    case ErrorCode::kDegenerateEmbedding: return VX_ERR_DEGENERATE_EMBEDDING;
    case ErrorCode::kShortUtterance: return VX_ERR_SHORT_UTTERANCE;
    case ErrorCode::kTrainingDiverged: return VX_ERR_TRAINING_DIVERGED;
    case ErrorCode::kIo: return VX_ERR_IO;
  }
  return VX_ERR_INTERNAL;
}

struct NullPointer {
  const char* what;
};

struct OutOfRange {
  std::string what;
};

template <typename T>
const T& deref(const T* p, const char* name) {
  if (p == nullptr) throw NullPointer{name};
  return *p;
}

template <typename T>
T& deref(T* p, const char* name) {
  if (p == nullptr) throw NullPointer{name};
  return *p;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return VX_OK;
  } catch (const voxtend::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const NullPointer& e) {
    g_last_error = std::string(e.what) + " must not be NULL";
    return VX_ERR_NULL_POINTER;
  } catch (const OutOfRange& e) {
    g_last_error = e.what;
    return VX_ERR_OUT_OF_RANGE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return VX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VX_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return VX_ERR_INTERNAL;
  }
}

template <typename T, typename... Args>
void emit(T** out, Args&&... args) {
  *out = new T{std::forward<Args>(args)...};
}

voxtend::FeatureMap features_from(const voxtend::Waveform& raw,
                                  const vx_fbank_options* options) {
  vx_fbank_options o;
  if (options != nullptr) {
    o = *options;
  } else {
    vx_fbank_options_default(&o);
  }
  voxtend::FbankConfig cfg;
  cfg.sample_rate = o.sample_rate;
  cfg.frame_len = o.frame_len;
  cfg.frame_shift = o.frame_shift;
  cfg.n_fft = o.n_fft;
  cfg.n_mels = o.n_mels;
  cfg.f_min = o.f_min;
  cfg.f_max = o.f_max;
  cfg.floor = o.floor;
  cfg.validate();
  voxtend::require(raw.sample_rate == cfg.sample_rate,
                   ErrorCode::kConfiguration,
                   "wav sample rate " + voxtend::format_decimal(raw.sample_rate) +
                       " does not match the configured " +
                       voxtend::format_decimal(cfg.sample_rate));
  voxtend::Waveform w =
      o.vad_enabled ? voxtend::vad_filter(raw, o.vad_frame_len,
                                          o.vad_threshold_db)
                    : raw;
  voxtend::require(voxtend::fbank_frame_count(w.samples.size(), cfg) > 0,
                   ErrorCode::kInvalidArgument,
                   o.vad_enabled
                       ? "no speech left after voice activity detection"
                       : "signal is shorter than one analysis frame");
  voxtend::FeatureMap x = voxtend::fbank(w, cfg);
  return o.mean_normalize ? voxtend::subtract_frame_mean(x) : x;
}

voxtend::ToyWorldSpec world_spec(const vx_toy_world_options* world) {
  const auto& w = deref(world, "world");
  voxtend::ToyWorldSpec spec;
  spec.speakers = w.speakers;
  spec.frames = w.frames;
  spec.bins = w.bins;
  spec.spread = w.spread;
  spec.frame_std = w.frame_std;
  spec.session_std = w.session_std;
  spec.seed = w.seed;
  return spec;
}

voxtend::SpeakerEmbedding embedding_from(const double* values, size_t len) {
  if (values == nullptr) throw NullPointer{"embedding"};
  return voxtend::SpeakerEmbedding(std::vector<double>(values, values + len));
}

}  // namespace

extern "C" {

const char* vx_version(void) { return "0.1.0"; }

const char* vx_status_name(int status) {
  switch (status) {
    case VX_OK: return "ok";
    case VX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VX_ERR_CONFIGURATION: return "configuration error";
    case VX_ERR_FORMAT: return "format error";
    case VX_ERR_DIVISION_BY_ZERO: return "division by zero";
    case VX_ERR_DEGENERATE_EMBEDDING: return "degenerate embedding";
    case VX_ERR_SHORT_UTTERANCE: return "utterance too short";
    case VX_ERR_TRAINING_DIVERGED: return "training diverged";
    case VX_ERR_IO: return "i/o error";
    case VX_ERR_NULL_POINTER: return "null pointer";
    case VX_ERR_OUT_OF_RANGE: return "out of range";
    case VX_ERR_INTERNAL: return "internal error";
    default: return "unknown status";
  }
}

const char* vx_last_error(void) { return g_last_error.c_str(); }

// Feature maps

int vx_fmap_create(size_t frames, size_t bins, const double* values,
                   vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    if (values == nullptr) throw NullPointer{"values"};
    voxtend::require(frames > 0 && bins > 0, ErrorCode::kInvalidArgument,
                     "feature map needs at least one frame and one bin");
    emit(out, voxtend::FeatureMap(
                  frames, bins,
                  std::vector<double>(values, values + frames * bins)));
  });
}

int vx_fmap_load(const char* path, vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    deref(path, "path");
    emit(out, voxtend::parse_feature_map(
                  voxtend::read_text_file(path)));
  });
}

int vx_fmap_save(const vx_fmap* fmap, const char* path) {
  return guarded([&] {
    const auto& f = deref(fmap, "fmap");
    deref(path, "path");
    voxtend::write_text_file(path, voxtend::serialize_feature_map(f.value));
  });
}

size_t vx_fmap_frames(const vx_fmap* fmap) {
  return fmap ? fmap->value.frames() : 0;
}

size_t vx_fmap_bins(const vx_fmap* fmap) {
  return fmap ? fmap->value.bins() : 0;
}

const double* vx_fmap_data(const vx_fmap* fmap) {
  return fmap ? fmap->value.values().data() : nullptr;
}

void vx_fmap_destroy(vx_fmap* fmap) { delete fmap; }

// Front-end

void vx_fbank_options_default(vx_fbank_options* options) {
  if (options == nullptr) return;
  const voxtend::FbankConfig cfg;
  options->sample_rate = cfg.sample_rate;
  options->frame_len = cfg.frame_len;
  options->frame_shift = cfg.frame_shift;
  options->n_fft = cfg.n_fft;
  options->n_mels = cfg.n_mels;
  options->f_min = cfg.f_min;
  options->f_max = cfg.f_max;
  options->floor = cfg.floor;
  options->vad_enabled = 1;
  options->vad_frame_len = 0.025;
  options->vad_threshold_db = -40.0;
  options->mean_normalize = 0;
}

int vx_features_from_wav(const char* wav_path, const vx_fbank_options* options,
                         vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    deref(wav_path, "wav_path");
    emit(out, features_from(voxtend::read_wav_file(wav_path), options));
  });
}

int vx_features_from_wav_bytes(const uint8_t* bytes, size_t size,
                               const vx_fbank_options* options, vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    if (bytes == nullptr) throw NullPointer{"bytes"};
    emit(out, features_from(voxtend::read_wav({bytes, size}), options));
  });
}

// Schedules

int vx_schedule_create(const char* kind, size_t steps, vx_schedule** out) {
  return guarded([&] {
    deref(out, "out");
    deref(kind, "kind");
    emit(out, voxtend::build_schedule(std::string_view(kind), steps));
  });
}

int vx_schedule_load(const char* path, vx_schedule** out) {
  return guarded([&] {
    deref(out, "out");
    deref(path, "path");
    emit(out, voxtend::parse_schedule(voxtend::read_text_file(path)));
  });
}

int vx_schedule_save(const vx_schedule* schedule, const char* path) {
  return guarded([&] {
    const auto& s = deref(schedule, "schedule");
    deref(path, "path");
    voxtend::write_text_file(path, voxtend::serialize_schedule(s.value));
  });
}

int vx_schedule_set_variance(vx_schedule* schedule, const char* variance) {
  return guarded([&] {
    auto& s = deref(schedule, "schedule");
    deref(variance, "variance");
    const std::string v = variance;
    voxtend::VarianceKind kind;
    if (v == "posterior") {
      kind = voxtend::VarianceKind::kPosterior;
    } else if (v == "beta") {
      kind = voxtend::VarianceKind::kBeta;
    } else {
      voxtend::fail(ErrorCode::kConfiguration,
                    "unknown variance '" + v + "' (expected posterior or beta)");
    }
    s.value = s.value.with_variance(kind);
  });
}

size_t vx_schedule_steps(const vx_schedule* schedule) {
  return schedule ? schedule->value.steps() : 0;
}

int vx_schedule_alpha_bar(const vx_schedule* schedule, size_t t, double* out) {
  return guarded([&] {
    const auto& s = deref(schedule, "schedule");
    deref(out, "out");
    if (t < 1 || t > s.value.steps()) {
      throw OutOfRange{"step " + std::to_string(t) + " outside 1.." +
                       std::to_string(s.value.steps())};
    }
    *out = s.value.alpha_bar(t);
  });
}

void vx_schedule_destroy(vx_schedule* schedule) { delete schedule; }

// Embedders

int vx_embedder_create(size_t dim, size_t bins, const double* projection,
                       vx_embedder** out) {
  return guarded([&] {
    deref(out, "out");
    if (projection == nullptr) throw NullPointer{"projection"};
    emit(out, voxtend::ToyEmbedder(
                  dim, bins,
                  std::vector<double>(projection, projection + dim * bins)));
  });
}

int vx_embedder_random(size_t dim, size_t bins, uint64_t seed,
                       vx_embedder** out) {
  return guarded([&] {
    deref(out, "out");
    emit(out, voxtend::make_toy_embedder(dim, bins, seed));
  });
}

int vx_embedder_load(const char* path, vx_embedder** out) {
  return guarded([&] {
    deref(out, "out");
    deref(path, "path");
    emit(out, voxtend::parse_embedder(voxtend::read_text_file(path)));
  });
}

int vx_embedder_save(const vx_embedder* embedder, const char* path) {
  return guarded([&] {
    const auto& e = deref(embedder, "embedder");
    deref(path, "path");
    voxtend::write_text_file(path, voxtend::serialize_embedder(e.value));
  });
}

size_t vx_embedder_dim(const vx_embedder* embedder) {
  return embedder ? embedder->value.dim() : 0;
}

size_t vx_embedder_bins(const vx_embedder* embedder) {
  return embedder ? embedder->value.bins() : 0;
}

int vx_embed(const vx_embedder* embedder, const vx_fmap* fmap, double* out,
             size_t out_len) {
  return guarded([&] {
    const auto& e = deref(embedder, "embedder");
    const auto& f = deref(fmap, "fmap");
    deref(out, "out");
    if (out_len < e.value.dim()) {
      throw OutOfRange{"output buffer holds " + std::to_string(out_len) +
                       " values, embedding has " +
                       std::to_string(e.value.dim())};
    }
    const auto emb = e.value.embed(f.value);
    std::copy(emb.values().begin(), emb.values().end(), out);
  });
}

void vx_embedder_destroy(vx_embedder* embedder) { delete embedder; }

// Toy world and training

void vx_toy_world_options_default(vx_toy_world_options* options) {
  if (options == nullptr) return;
  const voxtend::ToyWorldSpec spec;
  options->speakers = spec.speakers;
  options->frames = spec.frames;
  options->bins = spec.bins;
  options->spread = spec.spread;
  options->frame_std = spec.frame_std;
  options->session_std = spec.session_std;
  options->seed = spec.seed;
}

void vx_train_options_default(vx_train_options* options) {
  if (options == nullptr) return;
  const voxtend::TrainConfig cfg;
  options->steps = cfg.steps;
  options->batch = cfg.batch;
  options->hidden = voxtend::SmallNetShape{}.hidden;
  options->learning_rate = cfg.learning_rate;
  options->p_uncond = cfg.p_uncond;
  options->seed = 1;
}

int vx_toy_utterance(const vx_toy_world_options* world, size_t speaker,
                     size_t frames, uint64_t seed, vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    const voxtend::ToyWorld w(world_spec(world));
    if (speaker >= w.speakers()) {
      throw OutOfRange{"speaker " + std::to_string(speaker) + " outside 0.." +
                       std::to_string(w.speakers() - 1)};
    }
    voxtend::DiffusionSeed rng(seed);
    emit(out, w.utterance(speaker, frames, rng));
  });
}

int vx_train_toy(const vx_toy_world_options* world,
                 const vx_train_options* train, const vx_embedder* embedder,
                 const vx_schedule* schedule, vx_net** out, double* losses) {
  return guarded([&] {
    deref(out, "out");
    const auto& opts = deref(train, "train");
    const auto& emb = deref(embedder, "embedder");
    const auto& sched = deref(schedule, "schedule");
    const voxtend::ToyDataset dataset(voxtend::ToyWorld(world_spec(world)),
                                      emb.value);
    voxtend::SmallNetShape shape;
    shape.frames = dataset.world().spec().frames;
    shape.bins = dataset.world().spec().bins;
    shape.hidden = opts.hidden;
    shape.cond_dim = emb.value.dim();
    shape.steps = sched.value.steps();
    voxtend::TrainConfig cfg;
    cfg.steps = opts.steps;
    cfg.batch = opts.batch;
    cfg.learning_rate = opts.learning_rate;
    cfg.p_uncond = opts.p_uncond;
    voxtend::DiffusionSeed rng(opts.seed);
    auto net = voxtend::SmallNetEstimator::initialize(shape, rng);
    auto result = voxtend::train_estimator(
        dataset, std::move(net), cfg, sched.value, rng,
        [losses](std::size_t epoch, double loss) {
          if (losses != nullptr) losses[epoch - 1] = loss;
        });
    emit(out, std::move(result.net));
  });
}

int vx_net_load(const char* path, vx_net** out) {
  return guarded([&] {
    deref(out, "out");
    deref(path, "path");
    emit(out, voxtend::parse_net(voxtend::read_text_file(path)));
  });
}

int vx_net_save(const vx_net* net, const char* path) {
  return guarded([&] {
    const auto& n = deref(net, "net");
    deref(path, "path");
    voxtend::write_text_file(path, voxtend::serialize_net(n.value));
  });
}

size_t vx_net_frames(const vx_net* net) { return net ? net->value.frames() : 0; }
size_t vx_net_bins(const vx_net* net) { return net ? net->value.bins() : 0; }
size_t vx_net_steps(const vx_net* net) {
  return net ? net->value.shape().steps : 0;
}
void vx_net_destroy(vx_net* net) { delete net; }

// Sampling

void vx_guidance_options_default(vx_guidance_options* options) {
  if (options == nullptr) return;
  options->mode = VX_GUIDANCE_BUILTIN;
  options->scale = voxtend::default_scale(voxtend::GuidanceMode::kBuiltin);
  options->target_frames = 0;
  options->trace = nullptr;
  options->trace_user = nullptr;
}

int vx_sample(const vx_net* net, const vx_embedder* embedder,
              const vx_schedule* schedule, const vx_guidance_options* options,
              const double* embedding, size_t embedding_len, uint64_t seed,
              vx_fmap** out) {
  return guarded([&] {
    deref(out, "out");
    const auto& n = deref(net, "net").value;
    const auto& sched = deref(schedule, "schedule").value;
    const auto& o = deref(options, "options");
    voxtend::require(n.shape().steps == sched.steps(),
                     ErrorCode::kConfiguration,
                     "schedule has " + std::to_string(sched.steps()) +
                         " steps but the net was trained with " +
                         std::to_string(n.shape().steps));
    const std::size_t frames =
        o.target_frames == 0 ? n.frames() : o.target_frames;
    voxtend::DiffusionSeed rng(seed);
    if (o.mode == VX_GUIDANCE_NONE) {
      voxtend::require(frames == n.frames(), ErrorCode::kConfiguration,
                       "target frame count does not match the net");
      emit(out, voxtend::sample_plain(n, sched, frames, rng));
      return;
    }
    voxtend::require(o.mode == VX_GUIDANCE_EXTERNAL ||
                         o.mode == VX_GUIDANCE_BUILTIN,
                     ErrorCode::kConfiguration,
                     "unknown guidance mode " + std::to_string(o.mode));
    const auto e = embedding_from(embedding, embedding_len);
    voxtend::GuidanceConfig cfg;
    cfg.mode = o.mode == VX_GUIDANCE_EXTERNAL
                   ? voxtend::GuidanceMode::kExternal
                   : voxtend::GuidanceMode::kBuiltin;
    cfg.scale = o.scale;
    cfg.target_frames = frames;
    if (o.trace != nullptr) {
      voxtend::require(embedder != nullptr, ErrorCode::kConfiguration,
                       "tracing needs an embedder");
      cfg.trace = [fn = o.trace, user = o.trace_user](std::string_view line) {
        const std::string s(line);
        fn(s.c_str(), user);
      };
    }
    if (cfg.mode == voxtend::GuidanceMode::kExternal) {
      voxtend::require(embedder != nullptr, ErrorCode::kConfiguration,
                       "external guidance needs an embedder");
      emit(out, voxtend::sample_external(e, cfg, n, embedder->value, sched,
                                         rng));
    } else {
      emit(out, voxtend::sample_builtin(
                    e, cfg, n, sched, rng,
                    embedder != nullptr ? &embedder->value : nullptr));
    }
  });
}

// Metrics

namespace {

void fill_metrics(const voxtend::ScoreSet& s, double p_target, double c_fa,
                  double c_fr, double* eer, double* min_dcf) {
  if (eer != nullptr) *eer = voxtend::eer(s);
  if (min_dcf != nullptr) *min_dcf = voxtend::min_dcf(s, p_target, c_fa, c_fr);
}

}  // namespace

int vx_metrics(const double* scores, const int* labels, size_t n,
               double p_target, double c_fa, double c_fr, double* eer,
               double* min_dcf) {
  return guarded([&] {
    if (n > 0 && (scores == nullptr || labels == nullptr)) {
      throw NullPointer{"scores/labels"};
    }
    voxtend::ScoreSet s;
    for (size_t i = 0; i < n; ++i) {
      voxtend::require(labels[i] == 0 || labels[i] == 1,
                       ErrorCode::kInvalidArgument,
                       "label " + std::to_string(i) + " is not 0 or 1");
      s.add(scores[i], labels[i] == 1 ? voxtend::TrialLabel::kSame
                                      : voxtend::TrialLabel::kDifferent);
    }
    fill_metrics(s, p_target, c_fa, c_fr, eer, min_dcf);
  });
}

int vx_metrics_csv(const char* text, double p_target, double c_fa, double c_fr,
                   double* eer, double* min_dcf, size_t* n_out) {
  return guarded([&] {
    deref(text, "text");
    const auto s = voxtend::parse_score_csv(text);
    fill_metrics(s, p_target, c_fa, c_fr, eer, min_dcf);
    if (n_out != nullptr) *n_out = s.size();
  });
}

// Protocol

void vx_protocol_options_default(vx_protocol_options* options) {
  if (options == nullptr) return;
  const voxtend::ProtocolConfig cfg;
  options->mode = VX_GUIDANCE_BUILTIN;
  options->scale = voxtend::default_scale(voxtend::GuidanceMode::kBuiltin);
  options->frame_shift = 0.010;
  options->master_seed = cfg.master_seed;
  options->extend_enroll = cfg.extend_enroll ? 1 : 0;
  options->threads = cfg.threads;
  options->cache_dir = nullptr;
  options->model_tag = nullptr;
}

int vx_protocol_create(vx_protocol** out) {
  return guarded([&] {
    deref(out, "out");
    *out = new vx_protocol();
  });
}

void vx_protocol_destroy(vx_protocol* protocol) { delete protocol; }

int vx_protocol_add_utterance(vx_protocol* protocol, const char* id,
                              const vx_fmap* features) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    deref(id, "id");
    const auto& f = deref(features, "features");
    voxtend::require(*id != '\0', ErrorCode::kInvalidArgument,
                     "utterance id must not be empty");
    const auto [it, inserted] = p.utterances.emplace(id, f.value);
    voxtend::require(inserted, ErrorCode::kInvalidArgument,
                     std::string("duplicate utterance id '") + id + "'");
  });
}

int vx_protocol_add_trial(vx_protocol* protocol, int label, const char* enroll,
                          const char* test) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    deref(enroll, "enroll");
    deref(test, "test");
    voxtend::require(label == 0 || label == 1, ErrorCode::kInvalidArgument,
                     "trial label must be 0 or 1");
    p.trials.push_back({enroll, test,
                        label == 1 ? voxtend::TrialLabel::kSame
                                   : voxtend::TrialLabel::kDifferent});
  });
}

int vx_protocol_load_trials(vx_protocol* protocol, const char* text) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    deref(text, "text");
    auto parsed = voxtend::load_trials(text);
    p.trials.insert(p.trials.end(), parsed.begin(), parsed.end());
  });
}

size_t vx_protocol_trial_count(const vx_protocol* protocol) {
  return protocol ? protocol->trials.size() : 0;
}

const char* vx_protocol_trial_utterance(const vx_protocol* protocol, size_t i,
                                        int side) {
  if (protocol == nullptr || i >= protocol->trials.size()) return nullptr;
  const auto& t = protocol->trials[i];
  return side == 0 ? t.enroll.c_str() : t.test.c_str();
}

int vx_protocol_add_condition(vx_protocol* protocol, const char* kind,
                              double clip_s, double gen_s) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    deref(kind, "kind");
    voxtend::Condition c;
    c.kind = voxtend::parse_condition_kind(kind);
    c.clip_duration = clip_s;
    c.gen_duration = gen_s;
    c.validate();
    p.conditions.push_back(c);
  });
}

int vx_protocol_add_generator(vx_protocol* protocol, const vx_net* net) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    p.generators.push_back(deref(net, "net").value);
  });
}

int vx_protocol_set_embedder(vx_protocol* protocol,
                             const vx_embedder* embedder) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    p.embedder = deref(embedder, "embedder").value;
  });
}

int vx_protocol_set_schedule(vx_protocol* protocol,
                             const vx_schedule* schedule) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    p.schedule = deref(schedule, "schedule").value;
  });
}

int vx_protocol_run(vx_protocol* protocol, const vx_protocol_options* options) {
  return guarded([&] {
    auto& p = deref(protocol, "protocol");
    const auto& o = deref(options, "options");
    voxtend::require(p.embedder.has_value(), ErrorCode::kConfiguration,
                     "protocol has no embedder");
    voxtend::require(o.mode == VX_GUIDANCE_EXTERNAL ||
                         o.mode == VX_GUIDANCE_BUILTIN,
                     ErrorCode::kConfiguration,
                     "protocol guidance mode must be external or built-in");
    voxtend::ExtendContext ctx;
    ctx.embedder = &*p.embedder;
    for (const auto& g : p.generators) ctx.generators.push_back(&g);
    ctx.schedule = p.schedule ? &*p.schedule : nullptr;
    ctx.mode = o.mode == VX_GUIDANCE_EXTERNAL ? voxtend::GuidanceMode::kExternal
                                              : voxtend::GuidanceMode::kBuiltin;
    ctx.scale = o.scale;
    ctx.frame_shift = o.frame_shift;
    voxtend::ProtocolConfig cfg;
    cfg.master_seed = o.master_seed;
    cfg.extend_enroll = o.extend_enroll != 0;
    cfg.threads = o.threads;
    if (o.cache_dir != nullptr && *o.cache_dir != '\0') {
      cfg.cache_dir = o.cache_dir;
    }
    if (o.model_tag != nullptr) cfg.model_tag = o.model_tag;
    auto output =
        voxtend::run_protocol(p.trials, p.utterances, p.conditions, ctx, cfg);
    p.results_csv = voxtend::results_csv(output.rows);
    p.embeddings_csv = voxtend::embeddings_csv(output.embeddings);
    p.output = std::move(output);
  });
}

size_t vx_protocol_result_count(const vx_protocol* protocol) {
  return protocol ? protocol->output.rows.size() : 0;
}

int vx_protocol_result(const vx_protocol* protocol, size_t i,
                       vx_result_row* out) {
  return guarded([&] {
    const auto& p = deref(protocol, "protocol");
    deref(out, "out");
    if (i >= p.output.rows.size()) {
      throw OutOfRange{"result " + std::to_string(i) + " of " +
                       std::to_string(p.output.rows.size())};
    }
    const auto& r = p.output.rows[i];
    out->condition = r.condition.c_str();
    out->clip_s = r.clip_s;
    out->gen_s = r.gen_s;
    out->eer = r.eer;
    out->mindcf = r.mindcf;
    out->n_trials = r.n_trials;
  });
}

const char* vx_protocol_results_csv(const vx_protocol* protocol) {
  return protocol ? protocol->results_csv.c_str() : nullptr;
}

const char* vx_protocol_embeddings_csv(const vx_protocol* protocol) {
  return protocol ? protocol->embeddings_csv.c_str() : nullptr;
}

}  // extern "C"
