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

#include "voxtend/audio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 |
         static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void wav_error(const std::string& field, const std::string& why) {
  fail(ErrorCode::kFormat, "wav " + field + ": " + why);
}

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Waveform read_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) wav_error("header", "shorter than 12 bytes");
  if (!tag_is(bytes, 0, "RIFF")) wav_error("riff tag", "missing 'RIFF'");
  if (!tag_is(bytes, 8, "WAVE")) wav_error("wave tag", "missing 'WAVE'");

  bool have_fmt = false;
  Waveform w;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) {
        wav_error("fmt chunk", "truncated");
      }
      const std::uint16_t format = read_u16(bytes, body);
      const std::uint16_t channels = read_u16(bytes, body + 2);
      const std::uint32_t rate = read_u32(bytes, body + 4);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != 1) {
        wav_error("audio format", "only PCM (1) is supported, got " + std::to_string(format));
      }
      if (channels != 1) {
        wav_error("channels", "only mono is supported, got " + std::to_string(channels));
      }
      if (bits != 16) {
        wav_error("bits per sample", "only 16-bit is supported, got " + std::to_string(bits));
      }
      if (rate == 0) wav_error("sample rate", "must be positive");
      w.sample_rate = rate;
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) wav_error("data chunk", "appears before the fmt chunk");
      if (body + size > bytes.size()) {
        wav_error("data chunk", "declares " + std::to_string(size) +
                                    " bytes but only " +
                                    std::to_string(bytes.size() - body) +
                                    " remain");
      }
      if (size % 2 != 0) wav_error("data chunk", "odd byte count for 16-bit samples");
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
        w.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1u);
  }
  wav_error(have_fmt ? "data chunk" : "fmt chunk", "missing");
}

Waveform read_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return read_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& w) {
  require(w.sample_rate > 0.0, ErrorCode::kInvalidArgument,
          "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

Waveform vad_filter(const Waveform& w, double frame_len, double threshold_db) {
  require(frame_len > 0.0, ErrorCode::kInvalidArgument,
          "vad frame length must be positive");
  const auto frame = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(frame_len * w.sample_rate)));
  Waveform out{w.sample_rate, {}};
  for (std::size_t start = 0; start + frame <= w.samples.size(); start += frame) {
    double energy = 0.0;
    for (std::size_t i = start; i < start + frame; ++i) {
      energy += w.samples[i] * w.samples[i];
    }
    energy /= static_cast<double>(frame);
    const double level_db = 10.0 * std::log10(energy);  // -inf for silence
    if (level_db >= threshold_db) {
      out.samples.insert(out.samples.end(), w.samples.begin() + static_cast<std::ptrdiff_t>(start),
                         w.samples.begin() + static_cast<std::ptrdiff_t>(start + frame));
    }
  }
  return out;
}

std::size_t FbankConfig::frame_samples() const {
  return static_cast<std::size_t>(std::lround(frame_len * sample_rate));
}

std::size_t FbankConfig::shift_samples() const {
  return static_cast<std::size_t>(std::lround(frame_shift * sample_rate));
}

void FbankConfig::validate() const {
  require(sample_rate > 0.0, ErrorCode::kConfiguration, "sample rate must be positive");
  require(frame_samples() >= 1 && shift_samples() >= 1, ErrorCode::kConfiguration,
          "frame length and shift must cover at least one sample");
  require(n_fft >= 2 && (n_fft & (n_fft - 1)) == 0, ErrorCode::kConfiguration,
          "n_fft must be a power of two");
  require(n_fft >= frame_samples(), ErrorCode::kConfiguration,
          "n_fft must be at least the frame length in samples");
  require(n_mels >= 1, ErrorCode::kConfiguration, "n_mels must be positive");
  require(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0,
          ErrorCode::kConfiguration, "need 0 <= f_min < f_max <= sample_rate / 2");
  require(floor > 0.0, ErrorCode::kConfiguration, "log floor must be positive");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank build_mel_filterbank(const FbankConfig& cfg) {
  cfg.validate();
  MelFilterbank fb;
  fb.spectrum_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(cfg.f_max);
  std::vector<double> edges(cfg.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.n_mels + 1));
  }
  fb.centers_hz.assign(edges.begin() + 1, edges.end() - 1);
  fb.weights.assign(cfg.n_mels * fb.spectrum_bins, 0.0);
  const double bin_hz = cfg.sample_rate / static_cast<double>(cfg.n_fft);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < fb.spectrum_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= center) {
        w = (f - lo) / (center - lo);
      } else if (f > center && f < hi) {
        w = (hi - f) / (hi - center);
      }
      fb.weights[m * fb.spectrum_bins + k] = w;
    }
  }
  return fb;
}

std::size_t fbank_frame_count(std::size_t num_samples, const FbankConfig& cfg) {
  const std::size_t frame = cfg.frame_samples();
  if (num_samples < frame) return 0;
  return 1 + (num_samples - frame) / cfg.shift_samples();
}

FeatureMap fbank(const Waveform& w, const FbankConfig& cfg) {
  cfg.validate();
  require(std::abs(w.sample_rate - cfg.sample_rate) < 1e-9, ErrorCode::kInvalidArgument,
          "waveform sample rate " + std::to_string(w.sample_rate) +
              " does not match the filterbank's " + std::to_string(cfg.sample_rate));
  const std::size_t frames = fbank_frame_count(w.samples.size(), cfg);
  require(frames >= 1, ErrorCode::kInvalidArgument,
          "waveform shorter than one analysis frame");

  const MelFilterbank fb = build_mel_filterbank(cfg);
  const std::size_t frame_len = cfg.frame_samples();
  const std::size_t shift = cfg.shift_samples();
  std::vector<double> window(frame_len, 1.0);
  if (frame_len > 1) {
    for (std::size_t i = 0; i < frame_len; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(frame_len - 1));
    }
  }

  std::unique_ptr<double, FftwDeleter> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * cfg.n_fft)));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * fb.spectrum_bins)));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(cfg.n_fft), in.get(), spec.get(),
                                FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorCode::kConfiguration, "FFT planning failed");

  FeatureMap out(frames, cfg.n_mels);
  std::vector<double> power(fb.spectrum_bins);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * shift;
    std::fill(in.get(), in.get() + cfg.n_fft, 0.0);
    for (std::size_t i = 0; i < frame_len; ++i) {
      in.get()[i] = w.samples[start + i] * window[i];
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < fb.spectrum_bins; ++k) {
      power[k] = spec.get()[k][0] * spec.get()[k][0] + spec.get()[k][1] * spec.get()[k][1];
    }
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      const auto row = fb.row(m);
      double energy = 0.0;
      for (std::size_t k = 0; k < fb.spectrum_bins; ++k) energy += row[k] * power[k];
      out(f, m) = std::log(energy + cfg.floor);
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

FeatureMap subtract_frame_mean(const FeatureMap& x) {
  FeatureMap out = x;
  for (std::size_t m = 0; m < x.bins(); ++m) {
    double mean = 0.0;
    for (std::size_t f = 0; f < x.frames(); ++f) mean += x(f, m);
    mean /= static_cast<double>(x.frames());
    for (std::size_t f = 0; f < x.frames(); ++f) out(f, m) -= mean;
  }
  return out;
}

}  // namespace voxtend
