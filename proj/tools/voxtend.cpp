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

// voxtend command-line front end over the C API.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "settings.hpp"
#include "voxtend/voxtend.h"

namespace fs = std::filesystem;
using namespace voxtend_cli;

namespace {

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Fmap = std::unique_ptr<vx_fmap, Deleter<vx_fmap, vx_fmap_destroy>>;
using Schedule = std::unique_ptr<vx_schedule, Deleter<vx_schedule, vx_schedule_destroy>>;
using Embedder = std::unique_ptr<vx_embedder, Deleter<vx_embedder, vx_embedder_destroy>>;
using Net = std::unique_ptr<vx_net, Deleter<vx_net, vx_net_destroy>>;
using Protocol = std::unique_ptr<vx_protocol, Deleter<vx_protocol, vx_protocol_destroy>>;

// Library failures during validation exit with 1, later ones with 2.
void check(int status, int exit_code, const std::string& context) {
  if (status == VX_OK) return;
  if (status == VX_ERR_TRAINING_DIVERGED) exit_code = kExitDiverged;
  throw CommandError(exit_code, context + ": " + vx_last_error());
}

std::string decimal(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void require_file(const Settings& s, const std::string& key) {
  if (!s.is_set(key)) invalid(key + " is required");
  if (!fs::is_regular_file(s.text(key))) invalid(key + ": no such file " + s.text(key));
}

// Creates the output directory and echoes the resolved settings into it.
fs::path open_output(const Settings& s) {
  const fs::path out = s.text("out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw CommandError(kExitRuntime, "cannot create " + out.string() + ": " + ec.message());
  write_file((out / "config.txt").string(), s.echo());
  return out;
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Embedder load_embedder(const Settings& s) {
  require_file(s, "embedder");
  vx_embedder* e = nullptr;
  check(vx_embedder_load(s.text("embedder").c_str(), &e), kExitValidation, "embedder");
  return Embedder(e);
}

Schedule load_schedule(const Settings& s) {
  require_file(s, "schedule");
  vx_schedule* p = nullptr;
  check(vx_schedule_load(s.text("schedule").c_str(), &p), kExitValidation, "schedule");
  return Schedule(p);
}

Net load_net(const std::string& path) {
  if (!fs::is_regular_file(path)) invalid("net: no such file " + path);
  vx_net* n = nullptr;
  check(vx_net_load(path.c_str(), &n), kExitValidation, path);
  return Net(n);
}

int guidance_mode(const std::string& name) {
  if (name == "none") return VX_GUIDANCE_NONE;
  if (name == "external") return VX_GUIDANCE_EXTERNAL;
  if (name == "builtin") return VX_GUIDANCE_BUILTIN;
  invalid("mode: expected none, external or builtin, got '" + name + "'");
}

double guidance_scale(const Settings& s, int mode) {
  if (!s.is_set("scale")) return mode == VX_GUIDANCE_EXTERNAL ? 2.0 : 3.0;
  const double v = s.number("scale");
  if (v < 0.0) invalid("scale must be >= 0");
  return v;
}

// ---------------------------------------------------------------------------

void declare_fbank(CLI::App& app, Settings& s) {
  vx_fbank_options d;
  vx_fbank_options_default(&d);
  s.declare(app, "sample_rate", decimal(d.sample_rate), "expected input sample rate (Hz)");
  s.declare(app, "frame_len", decimal(d.frame_len), "analysis frame length (s)");
  s.declare(app, "frame_shift", decimal(d.frame_shift), "frame shift (s)");
  s.declare(app, "n_fft", std::to_string(d.n_fft), "FFT size");
  s.declare(app, "n_mels", std::to_string(d.n_mels), "mel filters");
  s.declare(app, "f_min", decimal(d.f_min), "lowest filter edge (Hz)");
  s.declare(app, "f_max", decimal(d.f_max), "highest filter edge (Hz)");
  s.declare(app, "floor", decimal(d.floor), "energy floor before the log");
  s.declare(app, "vad", d.vad_enabled ? "true" : "false", "energy voice activity detection");
  s.declare(app, "vad_frame_len", decimal(d.vad_frame_len), "VAD frame length (s)");
  s.declare(app, "vad_threshold_db", decimal(d.vad_threshold_db), "VAD threshold (dBFS)");
  s.declare(app, "mean_normalize", d.mean_normalize ? "true" : "false",
            "subtract the per-bin mean");
}

vx_fbank_options fbank_options(const Settings& s) {
  vx_fbank_options o;
  o.sample_rate = s.number("sample_rate");
  o.frame_len = s.number("frame_len");
  o.frame_shift = s.number("frame_shift");
  o.n_fft = s.count("n_fft");
  o.n_mels = s.count("n_mels");
  o.f_min = s.number("f_min");
  o.f_max = s.number("f_max");
  o.floor = s.number("floor");
  o.vad_enabled = s.flag("vad");
  o.vad_frame_len = s.number("vad_frame_len");
  o.vad_threshold_db = s.number("vad_threshold_db");
  o.mean_normalize = s.flag("mean_normalize");
  return o;
}

int cmd_features(const Settings& s, const std::vector<std::string>& wavs) {
  if (!s.is_set("out")) invalid("out is required");
  const auto opts = fbank_options(s);
  std::set<std::string> names;
  for (const auto& w : wavs) {
    if (!fs::is_regular_file(w)) invalid("no such file " + w);
    if (!names.insert(fs::path(w).stem().string()).second) {
      invalid("two inputs share the output name " + fs::path(w).stem().string());
    }
  }
  std::vector<Fmap> maps;
  for (const auto& w : wavs) {
    vx_fmap* m = nullptr;
    check(vx_features_from_wav(w.c_str(), &opts, &m), kExitRuntime, w);
    maps.emplace_back(m);
  }
  const auto out = open_output(s);
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    const auto path = out / (fs::path(wavs[i]).stem().string() + ".fbank");
    check(vx_fmap_save(maps[i].get(), path.c_str()), kExitRuntime, path.string());
    std::cout << path.string() << " " << vx_fmap_frames(maps[i].get()) << "x"
              << vx_fmap_bins(maps[i].get()) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

void declare_train(CLI::App& app, Settings& s) {
  vx_toy_world_options w;
  vx_toy_world_options_default(&w);
  vx_train_options t;
  vx_train_options_default(&t);
  s.declare(app, "out", "", "output directory");
  s.declare(app, "schedule", "linear", "noise schedule: linear or cosine");
  s.declare(app, "T", "200", "diffusion steps");
  s.declare(app, "speakers", std::to_string(w.speakers), "toy speakers");
  s.declare(app, "frames", std::to_string(w.frames), "frames per map");
  s.declare(app, "bins", std::to_string(w.bins), "bins per frame");
  s.declare(app, "spread", decimal(w.spread), "std of speaker patterns");
  s.declare(app, "frame_std", decimal(w.frame_std), "per-element noise");
  s.declare(app, "session_std", decimal(w.session_std), "per-utterance offset");
  s.declare(app, "world_seed", std::to_string(w.seed), "toy world seed");
  s.declare(app, "embedder", "", "embedder file (default: a random projection)");
  s.declare(app, "embedder_dim", "8", "random embedder dimension");
  s.declare(app, "embedder_seed", "4", "random embedder seed");
  s.declare(app, "steps", std::to_string(t.steps), "gradient steps");
  s.declare(app, "batch", std::to_string(t.batch), "batch size");
  s.declare(app, "hidden", std::to_string(t.hidden), "hidden units");
  s.declare(app, "lr", decimal(t.learning_rate), "learning rate");
  s.declare(app, "p_uncond", decimal(t.p_uncond), "condition dropout");
  s.declare(app, "seed", std::to_string(t.seed), "training seed");
  s.declare(app, "emit_utterances", "0", "also write this many utterances per speaker");
  s.declare(app, "emit_frames", "32", "frames per emitted utterance");
  s.declare(app, "emit_speakers", "", "speakers to emit (default: speakers)");
  s.declare(app, "emit_world_seed", "", "world seed for emitted speakers (default: world_seed)");
  s.declare(app, "emit_seed", "5", "seed for emitted utterances");
}

vx_toy_world_options toy_world(const Settings& s) {
  vx_toy_world_options w;
  w.speakers = s.count("speakers");
  w.frames = s.count("frames");
  w.bins = s.count("bins");
  w.spread = s.number("spread");
  w.frame_std = s.number("frame_std");
  w.session_std = s.number("session_std");
  w.seed = s.seed("world_seed");
  return w;
}

int cmd_train(const Settings& s) {
  if (!s.is_set("out")) invalid("out is required");
  const auto world = toy_world(s);
  vx_train_options t;
  t.steps = s.count("steps");
  t.batch = s.count("batch");
  t.hidden = s.count("hidden");
  t.learning_rate = s.number("lr");
  t.p_uncond = s.number("p_uncond");
  t.seed = s.seed("seed");

  vx_schedule* sp = nullptr;
  check(vx_schedule_create(s.text("schedule").c_str(), s.count("T"), &sp), kExitValidation,
        "schedule");
  const Schedule sched(sp);
  Embedder emb;
  if (s.is_set("embedder")) {
    emb = load_embedder(s);
  } else {
    vx_embedder* e = nullptr;
    check(vx_embedder_random(s.count("embedder_dim"), world.bins, s.seed("embedder_seed"), &e),
          kExitValidation, "embedder");
    emb.reset(e);
  }
  vx_toy_world_options emit_world = world;
  if (s.is_set("emit_speakers")) emit_world.speakers = s.count("emit_speakers");
  if (s.is_set("emit_world_seed")) emit_world.seed = s.seed("emit_world_seed");
  const std::size_t per_speaker = s.count("emit_utterances");
  const std::size_t emit_frames = s.count("emit_frames");
  const std::uint64_t emit_seed = s.seed("emit_seed");

  std::vector<double> losses(t.steps);
  vx_net* np = nullptr;
  check(vx_train_toy(&world, &t, emb.get(), sched.get(), &np, losses.data()), kExitRuntime,
        "training");
  const Net net(np);

  std::map<std::string, Fmap> utts;
  for (std::size_t k = 0; k < emit_world.speakers && per_speaker > 0; ++k) {
    for (std::size_t u = 0; u < per_speaker; ++u) {
      vx_fmap* m = nullptr;
      const std::uint64_t seed = emit_seed * 1000003u + k * 1009u + u;
      check(vx_toy_utterance(&emit_world, k, emit_frames, seed, &m), kExitRuntime, "utterance");
      utts.emplace("s" + std::to_string(k) + "_" + std::to_string(u), Fmap(m));
    }
  }

  const auto out = open_output(s);
  check(vx_net_save(net.get(), (out / "net.txt").c_str()), kExitRuntime, "net.txt");
  check(vx_schedule_save(sched.get(), (out / "schedule.txt").c_str()), kExitRuntime,
        "schedule.txt");
  check(vx_embedder_save(emb.get(), (out / "embedder.txt").c_str()), kExitRuntime,
        "embedder.txt");
  std::string curve = "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    curve += std::to_string(i + 1) + "," + decimal(losses[i]) + "\n";
  }
  write_file((out / "losses.csv").string(), curve);
  if (!utts.empty()) {
    fs::create_directories(out / "utterances");
    for (const auto& [id, m] : utts) {
      const auto path = out / "utterances" / (id + ".fbank");
      check(vx_fmap_save(m.get(), path.c_str()), kExitRuntime, path.string());
    }
    if (per_speaker >= 2) {
      std::string trials;
      for (std::size_t a = 0; a < emit_world.speakers; ++a) {
        for (std::size_t b = 0; b < emit_world.speakers; ++b) {
          trials += std::string(a == b ? "1" : "0") + " s" + std::to_string(a) + "_0 s" +
                    std::to_string(b) + "_1\n";
        }
      }
      write_file((out / "trials.txt").string(), trials);
    }
  }
  std::cout << "final loss " << decimal(losses.back()) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

void declare_sample(CLI::App& app, Settings& s) {
  s.declare(app, "out", "", "output directory");
  s.declare(app, "net", "", "trained estimator");
  s.declare(app, "schedule", "", "schedule file");
  s.declare(app, "embedder", "", "embedder file (external guidance and tracing)");
  s.declare(app, "condition", "", "feature map whose embedding guides sampling");
  s.declare(app, "mode", "builtin", "none, external or builtin");
  s.declare(app, "scale", "", "guidance scale (default 2 external, 3 builtin)");
  s.declare(app, "frames", "0", "frames to generate (0: the estimator's)");
  s.declare(app, "count", "1", "number of samples");
  s.declare(app, "seed", "1", "seed of the first sample");
  s.declare(app, "trace", "false", "write per-step similarity traces");
}

int cmd_sample(const Settings& s) {
  if (!s.is_set("out")) invalid("out is required");
  require_file(s, "net");
  const int mode = guidance_mode(s.text("mode"));
  const bool trace = s.flag("trace");
  const Net net = load_net(s.text("net"));
  const Schedule sched = load_schedule(s);
  Embedder emb;
  if (s.is_set("embedder") || trace || mode != VX_GUIDANCE_NONE) emb = load_embedder(s);
  std::vector<double> e;
  if (mode != VX_GUIDANCE_NONE) {
    require_file(s, "condition");
    vx_fmap* m = nullptr;
    check(vx_fmap_load(s.text("condition").c_str(), &m), kExitValidation, "condition");
    const Fmap cond(m);
    e.resize(vx_embedder_dim(emb.get()));
    check(vx_embed(emb.get(), cond.get(), e.data(), e.size()), kExitValidation, "condition");
  }
  vx_guidance_options g;
  vx_guidance_options_default(&g);
  g.mode = mode;
  g.scale = guidance_scale(s, mode);
  g.target_frames = s.count("frames");
  const std::size_t n = s.count("count");
  const std::uint64_t seed = s.seed("seed");
  if (n == 0) invalid("count must be positive");

  std::vector<Fmap> samples;
  std::vector<std::string> traces(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (trace) {
      g.trace = [](const char* line, void* user) {
        *static_cast<std::string*>(user) += std::string(line) + "\n";
      };
      g.trace_user = &traces[i];
    }
    vx_fmap* m = nullptr;
    const int status = vx_sample(net.get(), emb.get(), sched.get(), &g,
                                 e.empty() ? nullptr : e.data(), e.size(), seed + i, &m);
    check(status, status == VX_ERR_CONFIGURATION ? kExitValidation : kExitRuntime, "sampling");
    samples.emplace_back(m);
  }
  const auto out = open_output(s);
  for (std::size_t i = 0; i < n; ++i) {
    const auto path = out / ("sample_" + std::to_string(i) + ".fbank");
    check(vx_fmap_save(samples[i].get(), path.c_str()), kExitRuntime, path.string());
    if (trace) write_file((out / ("trace_" + std::to_string(i) + ".txt")).string(), traces[i]);
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

void declare_extend_eval(CLI::App& app, Settings& s) {
  vx_protocol_options d;
  vx_protocol_options_default(&d);
  s.declare(app, "out", "", "output directory");
  s.declare(app, "trials", "", "trial list: '<0|1> <enroll> <test>' per line");
  s.declare(app, "features", "", "directory of <utterance>.fbank files");
  s.declare(app, "embedder", "", "embedder file");
  s.declare(app, "schedule", "", "schedule file");
  s.declare(app, "nets", "", "comma-separated generators, one per output length");
  s.declare(app, "conditions", "baseline@0.5,duplicate@0.5,dm@0.5+0.5,dm_plus@0.5+0.5",
            "comma-separated kind@clip[+gen] in seconds");
  s.declare(app, "mode", "builtin", "external or builtin");
  s.declare(app, "scale", "", "guidance scale (default 2 external, 3 builtin)");
  s.declare(app, "frame_shift", decimal(d.frame_shift), "seconds per frame");
  s.declare(app, "master_seed", std::to_string(d.master_seed), "master seed");
  s.declare(app, "threads", std::to_string(d.threads), "worker threads");
  s.declare(app, "extend_enroll", d.extend_enroll ? "true" : "false",
            "extend enrollment utterances too");
  s.declare(app, "cache_dir", "", "reuse generated maps from here (env VOXTEND_CACHE_DIR)");
  s.declare(app, "dump_embeddings", "false", "also write embeddings.csv");
  s.bind_env("cache_dir", "VOXTEND_CACHE_DIR");
}

struct ConditionSpec {
  std::string kind;
  double clip_s;
  double gen_s;
};

ConditionSpec parse_condition(const std::string& text) {
  ConditionSpec c{text, 0.0, 0.0};
  const auto at = text.find('@');
  if (at == std::string::npos) invalid("condition '" + text + "': expected kind@clip[+gen]");
  c.kind = text.substr(0, at);
  const std::string rest = text.substr(at + 1);
  const auto plus = rest.find('+');
  auto number = [&](const std::string& v) {
    double x = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size() || !(x > 0.0)) {
      invalid("condition '" + text + "': durations must be positive numbers");
    }
    return x;
  };
  c.clip_s = number(rest.substr(0, plus));
  if (plus != std::string::npos) c.gen_s = number(rest.substr(plus + 1));
  return c;
}

int cmd_extend_eval(const Settings& s) {
  if (!s.is_set("out")) invalid("out is required");
  require_file(s, "trials");
  if (!s.is_set("features") || !fs::is_directory(s.text("features"))) {
    invalid("features: no such directory '" + s.text("features") + "'");
  }
  const int mode = guidance_mode(s.text("mode"));
  if (mode == VX_GUIDANCE_NONE) invalid("mode: extension needs external or builtin guidance");
  const auto emb = load_embedder(s);
  const auto sched = load_schedule(s);
  std::vector<Net> nets;
  std::string model_bytes = read_file(s.text("embedder")) + read_file(s.text("schedule"));
  for (const auto& path : s.list("nets")) {
    nets.push_back(load_net(path));
    model_bytes += read_file(path);
  }

  vx_protocol* pp = nullptr;
  check(vx_protocol_create(&pp), kExitRuntime, "protocol");
  const Protocol p(pp);
  check(vx_protocol_load_trials(p.get(), read_file(s.text("trials")).c_str()), kExitValidation,
        s.text("trials"));
  std::set<std::string> ids;
  for (std::size_t i = 0; i < vx_protocol_trial_count(p.get()); ++i) {
    ids.insert(vx_protocol_trial_utterance(p.get(), i, 0));
    ids.insert(vx_protocol_trial_utterance(p.get(), i, 1));
  }
  for (const auto& id : ids) {
    const auto path = fs::path(s.text("features")) / (id + ".fbank");
    if (!fs::is_regular_file(path)) invalid("utterance " + id + ": missing " + path.string());
    vx_fmap* m = nullptr;
    check(vx_fmap_load(path.c_str(), &m), kExitValidation, "utterance " + id);
    const Fmap f(m);
    check(vx_protocol_add_utterance(p.get(), id.c_str(), f.get()), kExitValidation,
          "utterance " + id);
  }
  for (const auto& text : s.list("conditions")) {
    const auto c = parse_condition(text);
    check(vx_protocol_add_condition(p.get(), c.kind.c_str(), c.clip_s, c.gen_s),
          kExitValidation, "condition '" + text + "'");
  }
  check(vx_protocol_set_embedder(p.get(), emb.get()), kExitValidation, "embedder");
  check(vx_protocol_set_schedule(p.get(), sched.get()), kExitValidation, "schedule");
  for (const auto& n : nets) {
    check(vx_protocol_add_generator(p.get(), n.get()), kExitValidation, "nets");
  }

  vx_protocol_options o;
  vx_protocol_options_default(&o);
  o.mode = mode;
  o.scale = guidance_scale(s, mode);
  o.frame_shift = s.number("frame_shift");
  o.master_seed = s.seed("master_seed");
  o.threads = s.count("threads");
  o.extend_enroll = s.flag("extend_enroll");
  const std::string cache = s.text("cache_dir");
  char tag[17];
  std::snprintf(tag, sizeof tag, "%016llx",
                static_cast<unsigned long long>(fnv1a(model_bytes)));
  o.cache_dir = cache.empty() ? nullptr : cache.c_str();
  o.model_tag = tag;
  const bool dump = s.flag("dump_embeddings");

  const int status = vx_protocol_run(p.get(), &o);
  check(status, status == VX_ERR_CONFIGURATION ? kExitValidation : kExitRuntime, "extend-eval");
  const auto out = open_output(s);
  const std::string results = vx_protocol_results_csv(p.get());
  write_file((out / "results.csv").string(), results);
  if (dump) write_file((out / "embeddings.csv").string(), vx_protocol_embeddings_csv(p.get()));
  std::cout << results;
  return kExitOk;
}

// ---------------------------------------------------------------------------

void declare_metrics(CLI::App& app, Settings& s) {
  s.declare(app, "p_target", "0.01", "target prior");
  s.declare(app, "c_fa", "1", "false-accept cost");
  s.declare(app, "c_fr", "1", "false-reject cost");
}

int cmd_metrics(const Settings& s, const std::string& scores) {
  if (!fs::is_regular_file(scores)) invalid("no such file " + scores);
  double eer = 0.0, dcf = 0.0;
  std::size_t n = 0;
  check(vx_metrics_csv(read_file(scores).c_str(), s.number("p_target"), s.number("c_fa"),
                       s.number("c_fr"), &eer, &dcf, &n),
        kExitValidation, scores);
  std::cout << "n_trials=" << n << "\neer=" << decimal(eer) << "\nmindcf=" << decimal(dcf)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxtend: diffusion-based speaker feature extension toolkit"};
  app.set_version_flag("--version", vx_version());
  app.require_subcommand(1);

  Settings features_s, train_s, sample_s, eval_s, metrics_s;
  std::vector<std::string> wavs;
  std::string scores;

  auto* features = app.add_subcommand("features", "WAV files to log mel filterbank maps");
  features_s.add_config_option(*features);
  features_s.declare(*features, "out", "", "output directory");
  declare_fbank(*features, features_s);
  features->add_option("wavs", wavs, "input WAV files")->required();

  auto* train = app.add_subcommand("train", "train a noise estimator on a toy speaker world");
  train_s.add_config_option(*train);
  declare_train(*train, train_s);

  auto* sample = app.add_subcommand("sample", "generate feature maps");
  sample_s.add_config_option(*sample);
  declare_sample(*sample, sample_s);

  auto* eval = app.add_subcommand("extend-eval", "score trials under extension conditions");
  eval_s.add_config_option(*eval);
  declare_extend_eval(*eval, eval_s);

  auto* metrics = app.add_subcommand("metrics", "EER and MinDCF of a score CSV");
  metrics_s.add_config_option(*metrics);
  declare_metrics(*metrics, metrics_s);
  metrics->add_option("scores", scores, "CSV of score,label lines")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*features) return features_s.resolve(), cmd_features(features_s, wavs);
    if (*train) return train_s.resolve(), cmd_train(train_s);
    if (*sample) return sample_s.resolve(), cmd_sample(sample_s);
    if (*eval) return eval_s.resolve(), cmd_extend_eval(eval_s);
    if (*metrics) return metrics_s.resolve(), cmd_metrics(metrics_s, scores);
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
