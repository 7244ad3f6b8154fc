// Copyright (c) 2026 The HyperLips C++ Authors
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

#include "hyperlips/media/mel.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "hyperlips/error.h"

namespace hyperlips::media {
namespace {

constexpr double kLinearStep = 200.0 / 3.0;
constexpr double kLogStartHz = 1000.0;
constexpr double kLogStartMel = kLogStartHz / kLinearStep;
const double kLogStep = std::log(6.4) / 27.0;

double hz_to_mel(double hz) {
  if (hz < kLogStartHz) return hz / kLinearStep;
  return kLogStartMel + std::log(hz / kLogStartHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kLogStartMel) return mel * kLinearStep;
  return kLogStartHz * std::exp(kLogStep * (mel - kLogStartMel));
}

std::vector<double> periodic_hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

int64_t reflect_index(int64_t i, int64_t n) {
  if (n == 1) return 0;
  const int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

MelSpectrogram::MelSpectrogram(int bins, int steps, int64_t num_samples, std::vector<double> values)
    : bins_(bins), steps_(steps), num_samples_(num_samples), values_(std::move(values)) {
  require(values_.size() == static_cast<size_t>(bins) * steps, ErrorCode::kShapeMismatch,
          "mel value count does not match its shape");
}

int MelSpectrogram::frame_count() const {
  return static_cast<int>(std::llround(static_cast<double>(num_samples_) * kVideoFps / kSampleRate));
}

std::vector<std::vector<double>> mel_filterbank(const MelConfig& c) {
  const int n_freqs = c.n_fft / 2 + 1;
  std::vector<double> fft_hz(n_freqs);
  for (int k = 0; k < n_freqs; ++k) fft_hz[k] = static_cast<double>(k) * c.sample_rate / c.n_fft;

  const double mel_lo = hz_to_mel(c.fmin), mel_hi = hz_to_mel(c.fmax);
  std::vector<double> edges(c.n_mels + 2);
  for (int i = 0; i < c.n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (c.n_mels + 1));

  std::vector<std::vector<double>> bank(c.n_mels, std::vector<double>(n_freqs, 0.0));
  for (int m = 0; m < c.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double area_norm = 2.0 / (hi - lo);
    for (int k = 0; k < n_freqs; ++k) {
      const double rise = (fft_hz[k] - lo) / (mid - lo);
      const double fall = (hi - fft_hz[k]) / (hi - mid);
      bank[m][k] = std::max(0.0, std::min(rise, fall)) * area_norm;
    }
  }
  return bank;
}

MelSpectrogram melspectrogram(const Waveform& audio, const MelConfig& c) {
  require(audio.sample_rate == c.sample_rate, ErrorCode::kInvalidArgument,
          "melspectrogram expects " + std::to_string(c.sample_rate) + " Hz audio");
  const auto n = static_cast<int64_t>(audio.samples.size());
  require(n >= c.n_fft, ErrorCode::kTooShort,
          "audio has " + std::to_string(n) + " samples, needs at least " + std::to_string(c.n_fft));

  const int steps = static_cast<int>((n + c.hop - 1) / c.hop);
  const int n_freqs = c.n_fft / 2 + 1;
  const auto window = periodic_hann(c.n_fft);
  const auto bank = mel_filterbank(c);
  const int64_t pad = c.n_fft / 2;

  Eigen::FFT<double> fft;
  std::vector<double> frame(c.n_fft);
  std::vector<std::complex<double>> spectrum;
  std::vector<double> magnitude(n_freqs);
  std::vector<double> values(static_cast<size_t>(steps) * c.n_mels);
  for (int t = 0; t < steps; ++t) {
    const int64_t start = static_cast<int64_t>(t) * c.hop - pad;
    for (int i = 0; i < c.n_fft; ++i)
      frame[i] = audio.samples[reflect_index(start + i, n)] * window[i];
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_freqs; ++k) magnitude[k] = std::abs(spectrum[k]);
    for (int m = 0; m < c.n_mels; ++m) {
      double acc = 0.0;
      for (int k = 0; k < n_freqs; ++k) acc += bank[m][k] * magnitude[k];
      values[static_cast<size_t>(t) * c.n_mels + m] =
          20.0 * std::log10(std::max(c.amplitude_floor, acc));
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  for (double& v : values) v = range > 0.0 ? (v - lo) / range : 0.0;
  return MelSpectrogram(c.n_mels, steps, n, std::move(values));
}

int mel_window_start(int frame_idx) {
  return static_cast<int>(std::lround(frame_idx * 80.0 / kVideoFps));
}

MelChunk mel_window_for_frame(const MelSpectrogram& mel, int frame_idx) {
  require(frame_idx >= 0 && frame_idx < mel.frame_count(), ErrorCode::kIndexOutOfRange,
          "frame " + std::to_string(frame_idx) + " outside [0, " +
              std::to_string(mel.frame_count()) + ")");
  MelChunk chunk{kChunkSteps, mel.bins(), {}};
  chunk.values.reserve(static_cast<size_t>(kChunkSteps) * mel.bins());
  const int start = mel_window_start(frame_idx);
  for (int s = 0; s < kChunkSteps; ++s) {
    const int step = std::clamp(start + s, 0, mel.steps() - 1);
    for (int b = 0; b < mel.bins(); ++b) chunk.values.push_back(mel.at(step, b));
  }
  return chunk;
}

}  // namespace hyperlips::media
