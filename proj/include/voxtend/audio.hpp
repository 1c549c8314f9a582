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
#include <span>
#include <vector>

#include "voxtend/feature_map.hpp"

namespace voxtend {

struct Waveform {
  double sample_rate = 16000.0;
  std::vector<double> samples;
};

/// Parses a RIFF/WAVE byte stream holding 16-bit PCM mono audio. Samples are
/// scaled by 1/32768. Any malformed or unsupported field raises kFormat
/// naming the field.
Waveform read_wav(std::span<const std::uint8_t> bytes);
Waveform read_wav_file(const std::filesystem::path& path);

/// 16-bit PCM mono encoding of `w` (samples clipped to [-1, 1)).
std::vector<std::uint8_t> encode_wav(const Waveform& w);

/// Energy VAD: cuts the signal into non-overlapping frames of
/// round(frame_len * sample_rate) samples, drops those whose RMS level in
/// dBFS is below threshold_db and concatenates the rest. A trailing partial
/// frame is always dropped.
Waveform vad_filter(const Waveform& w, double frame_len, double threshold_db);

struct FbankConfig {
  double sample_rate = 16000.0;
  double frame_len = 0.025;
  double frame_shift = 0.010;
  std::size_t n_fft = 512;
  std::size_t n_mels = 64;
  double f_min = 20.0;
  double f_max = 8000.0;
  double floor = 1e-10;

  std::size_t frame_samples() const;
  std::size_t shift_samples() const;
  void validate() const;
};

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters over the power-spectrum bins 0..n_fft/2.
struct MelFilterbank {
  std::vector<double> centers_hz;  // n_mels
  std::vector<double> weights;     // n_mels x (n_fft/2 + 1), row-major
  std::size_t spectrum_bins = 0;

  std::span<const double> row(std::size_t mel) const {
    return std::span<const double>(weights).subspan(mel * spectrum_bins,
                                                    spectrum_bins);
  }
};

MelFilterbank build_mel_filterbank(const FbankConfig& cfg);

/// 1 + floor((n - frame) / shift) for n >= frame, 0 otherwise.
std::size_t fbank_frame_count(std::size_t num_samples, const FbankConfig& cfg);

/// Hann window -> |FFT|^2 -> mel filterbank -> log(energy + floor).
FeatureMap fbank(const Waveform& w, const FbankConfig& cfg);

/// Subtracts each bin's mean over frames.
FeatureMap subtract_frame_mean(const FeatureMap& x);

}  // namespace voxtend
