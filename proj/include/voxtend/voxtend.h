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

/*
 * C interface to libvoxtend.
 *
 * Objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_destroy. Every fallible call returns a
 * vx_status; on failure vx_last_error() describes the problem (the message is
 * thread-local and valid until the next failing call on the same thread).
 * Handles may be shared read-only between threads; mutating calls on one
 * handle must not run concurrently.
 */

#ifndef VOXTEND_VOXTEND_H_
#define VOXTEND_VOXTEND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VOXTEND_BUILDING)
#    define VX_API __declspec(dllexport)
#  else
#    define VX_API __declspec(dllimport)
#  endif
#else
#  define VX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vx_status {
  VX_OK = 0,
  VX_ERR_INVALID_ARGUMENT = -1,
  VX_ERR_CONFIGURATION = -2,
  VX_ERR_FORMAT = -3,
  VX_ERR_DIVISION_BY_ZERO = -4,
  VX_ERR_DEGENERATE_EMBEDDING = -5,
  VX_ERR_SHORT_UTTERANCE = -6,
  VX_ERR_TRAINING_DIVERGED = -7,
  VX_ERR_IO = -8,
  VX_ERR_NULL_POINTER = -9,
  VX_ERR_OUT_OF_RANGE = -10,
  VX_ERR_INTERNAL = -11
} vx_status;

VX_API const char* vx_version(void);
VX_API const char* vx_status_name(int status);
VX_API const char* vx_last_error(void);

/* ------------------------------------------------------------------------ */
/* Feature maps (frames x bins, row-major)                                   */

typedef struct vx_fmap vx_fmap;

VX_API int vx_fmap_create(size_t frames, size_t bins, const double* values,
                          vx_fmap** out);
VX_API int vx_fmap_load(const char* path, vx_fmap** out);
VX_API int vx_fmap_save(const vx_fmap* fmap, const char* path);
VX_API size_t vx_fmap_frames(const vx_fmap* fmap);
VX_API size_t vx_fmap_bins(const vx_fmap* fmap);
/* Borrowed pointer to frames*bins values, valid while the handle lives. */
VX_API const double* vx_fmap_data(const vx_fmap* fmap);
VX_API void vx_fmap_destroy(vx_fmap* fmap);

/* ------------------------------------------------------------------------ */
/* Front-end: WAV -> VAD -> log mel filterbank                               */

typedef struct vx_fbank_options {
  double sample_rate;
  double frame_len;   /* seconds */
  double frame_shift; /* seconds */
  size_t n_fft;
  size_t n_mels;
  double f_min;
  double f_max;
  double floor;
  int vad_enabled;
  double vad_frame_len;    /* seconds */
  double vad_threshold_db; /* dBFS */
  int mean_normalize;      /* subtract per-bin mean over frames */
} vx_fbank_options;

VX_API void vx_fbank_options_default(vx_fbank_options* options);

/* VX_ERR_INVALID_ARGUMENT when VAD leaves less than one analysis frame. */
VX_API int vx_features_from_wav(const char* wav_path,
                                const vx_fbank_options* options, vx_fmap** out);
VX_API int vx_features_from_wav_bytes(const uint8_t* bytes, size_t size,
                                      const vx_fbank_options* options,
                                      vx_fmap** out);

/* ------------------------------------------------------------------------ */
/* Noise schedules                                                           */

typedef struct vx_schedule vx_schedule;

/* kind: "linear" or "cosine". */
VX_API int vx_schedule_create(const char* kind, size_t steps, vx_schedule** out);
VX_API int vx_schedule_load(const char* path, vx_schedule** out);
VX_API int vx_schedule_save(const vx_schedule* schedule, const char* path);
/* variance: "posterior" (default) or "beta". */
VX_API int vx_schedule_set_variance(vx_schedule* schedule, const char* variance);
VX_API size_t vx_schedule_steps(const vx_schedule* schedule);
VX_API int vx_schedule_alpha_bar(const vx_schedule* schedule, size_t t,
                                 double* out);
VX_API void vx_schedule_destroy(vx_schedule* schedule);

/* ------------------------------------------------------------------------ */
/* Speaker embedder: normalize(W * frame-mean(x))                            */

typedef struct vx_embedder vx_embedder;

/* projection is dim x bins, row-major. */
VX_API int vx_embedder_create(size_t dim, size_t bins, const double* projection,
                              vx_embedder** out);
VX_API int vx_embedder_random(size_t dim, size_t bins, uint64_t seed,
                              vx_embedder** out);
VX_API int vx_embedder_load(const char* path, vx_embedder** out);
VX_API int vx_embedder_save(const vx_embedder* embedder, const char* path);
VX_API size_t vx_embedder_dim(const vx_embedder* embedder);
VX_API size_t vx_embedder_bins(const vx_embedder* embedder);
/* Writes dim() values to out (out_len must be >= dim()). */
VX_API int vx_embed(const vx_embedder* embedder, const vx_fmap* fmap,
                    double* out, size_t out_len);
VX_API void vx_embedder_destroy(vx_embedder* embedder);

/* ------------------------------------------------------------------------ */
/* Toy world and noise-estimator training                                    */

typedef struct vx_toy_world_options {
  size_t speakers;
  size_t frames;
  size_t bins;
  double spread;
  double frame_std;
  double session_std;
  uint64_t seed;
} vx_toy_world_options;

typedef struct vx_train_options {
  size_t steps;
  size_t batch;
  size_t hidden;
  double learning_rate;
  double p_uncond;
  uint64_t seed;
} vx_train_options;

VX_API void vx_toy_world_options_default(vx_toy_world_options* options);
VX_API void vx_train_options_default(vx_train_options* options);

/* Draws one utterance of `frames` frames for `speaker`. */
VX_API int vx_toy_utterance(const vx_toy_world_options* world, size_t speaker,
                            size_t frames, uint64_t seed, vx_fmap** out);

typedef struct vx_net vx_net;

/* Trains a conditional noise estimator on the toy world. `losses` may be
 * NULL; otherwise it must hold train->steps values and receives the
 * per-step loss curve (also on divergence, up to the failing step).
 * Divergence returns VX_ERR_TRAINING_DIVERGED. */
VX_API int vx_train_toy(const vx_toy_world_options* world,
                        const vx_train_options* train,
                        const vx_embedder* embedder,
                        const vx_schedule* schedule, vx_net** out,
                        double* losses);
VX_API int vx_net_load(const char* path, vx_net** out);
VX_API int vx_net_save(const vx_net* net, const char* path);
VX_API size_t vx_net_frames(const vx_net* net);
VX_API size_t vx_net_bins(const vx_net* net);
VX_API size_t vx_net_steps(const vx_net* net);
VX_API void vx_net_destroy(vx_net* net);

/* ------------------------------------------------------------------------ */
/* Guided sampling                                                           */

typedef enum vx_guidance_mode {
  VX_GUIDANCE_NONE = 0,     /* unconditional ancestral sampling */
  VX_GUIDANCE_EXTERNAL = 1, /* embedder-gradient guidance */
  VX_GUIDANCE_BUILTIN = 2   /* classifier-free guidance */
} vx_guidance_mode;

typedef void (*vx_trace_fn)(const char* line, void* user);

typedef struct vx_guidance_options {
  int mode;
  double scale;
  size_t target_frames;
  vx_trace_fn trace; /* optional: one "t=<int> sim=<decimal>" line per step */
  void* trace_user;
} vx_guidance_options;

VX_API void vx_guidance_options_default(vx_guidance_options* options);

/* `embedding` must be unit-norm. The embedder is required for external
 * guidance and for tracing; it may be NULL otherwise. */
VX_API int vx_sample(const vx_net* net, const vx_embedder* embedder,
                     const vx_schedule* schedule,
                     const vx_guidance_options* options,
                     const double* embedding, size_t embedding_len,
                     uint64_t seed, vx_fmap** out);

/* ------------------------------------------------------------------------ */
/* Verification metrics                                                      */

/* labels[i]: 1 = same speaker, 0 = different. */
VX_API int vx_metrics(const double* scores, const int* labels, size_t n,
                      double p_target, double c_fa, double c_fr, double* eer,
                      double* min_dcf);
/* Same over "<score>,<label>" CSV text; n_out may be NULL. */
VX_API int vx_metrics_csv(const char* text, double p_target, double c_fa,
                          double c_fr, double* eer, double* min_dcf,
                          size_t* n_out);

/* ------------------------------------------------------------------------ */
/* Extension protocol                                                        */

typedef struct vx_protocol vx_protocol;

typedef struct vx_protocol_options {
  int mode; /* VX_GUIDANCE_EXTERNAL or VX_GUIDANCE_BUILTIN */
  double scale;
  double frame_shift; /* seconds per frame */
  uint64_t master_seed;
  int extend_enroll; /* 0: only the test side is extended */
  size_t threads;
  const char* cache_dir; /* NULL disables caching */
  const char* model_tag; /* folded into cache keys; may be NULL */
} vx_protocol_options;

typedef struct vx_result_row {
  const char* condition; /* valid until the next run or destroy */
  double clip_s;
  double gen_s;
  double eer;
  double mindcf;
  size_t n_trials;
} vx_result_row;

VX_API void vx_protocol_options_default(vx_protocol_options* options);
VX_API int vx_protocol_create(vx_protocol** out);
VX_API void vx_protocol_destroy(vx_protocol* protocol);
/* The following copy their arguments. */
VX_API int vx_protocol_add_utterance(vx_protocol* protocol, const char* id,
                                     const vx_fmap* features);
VX_API int vx_protocol_add_trial(vx_protocol* protocol, int label,
                                 const char* enroll, const char* test);
/* Parses "<0|1> <enroll> <test>" lines and appends them. */
VX_API int vx_protocol_load_trials(vx_protocol* protocol, const char* text);
VX_API size_t vx_protocol_trial_count(const vx_protocol* protocol);
/* Borrowed id of trial i's enroll (side 0) or test (side 1) utterance. */
VX_API const char* vx_protocol_trial_utterance(const vx_protocol* protocol,
                                               size_t i, int side);
/* kind: "baseline", "dm", "dm_plus" or "duplicate". */
VX_API int vx_protocol_add_condition(vx_protocol* protocol, const char* kind,
                                     double clip_s, double gen_s);
VX_API int vx_protocol_add_generator(vx_protocol* protocol, const vx_net* net);
VX_API int vx_protocol_set_embedder(vx_protocol* protocol,
                                    const vx_embedder* embedder);
VX_API int vx_protocol_set_schedule(vx_protocol* protocol,
                                    const vx_schedule* schedule);
VX_API int vx_protocol_run(vx_protocol* protocol,
                           const vx_protocol_options* options);
VX_API size_t vx_protocol_result_count(const vx_protocol* protocol);
VX_API int vx_protocol_result(const vx_protocol* protocol, size_t i,
                              vx_result_row* out);
/* Borrowed CSV text of the last run. */
VX_API const char* vx_protocol_results_csv(const vx_protocol* protocol);
VX_API const char* vx_protocol_embeddings_csv(const vx_protocol* protocol);

#ifdef __cplusplus
}
#endif

#endif /* VOXTEND_VOXTEND_H_ */
