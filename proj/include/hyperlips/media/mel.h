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

#ifndef HYPERLIPS_MEDIA_MEL_H_
#define HYPERLIPS_MEDIA_MEL_H_

#include <cstdint>
#include <vector>

#include "hyperlips/media/audio.h"

namespace hyperlips::media {

struct MelConfig {
  int sample_rate = kSampleRate;
  int n_fft = 800;
  int hop = 200;
  int n_mels = 80;
  double fmin = 55.0;
  double fmax = 7600.0;
  double amplitude_floor = 1e-5;
};

inline constexpr int kVideoFps = 25;
inline constexpr int kChunkSteps = 16;

// Row-major steps x bins, normalised per clip to [0, 1].
class MelSpectrogram {
 public:
  MelSpectrogram() = default;
  MelSpectrogram(int bins, int steps, int64_t num_samples, std::vector<double> values);

  int bins() const { return bins_; }
  int steps() const { return steps_; }
  int64_t num_samples() const { return num_samples_; }
  double at(int step, int bin) const { return values_[static_cast<size_t>(step) * bins_ + bin]; }
  const std::vector<double>& values() const { return values_; }

  // Number of 25 fps video frames spanned by the source audio.
  int frame_count() const;

  bool operator==(const MelSpectrogram&) const = default;

 private:
  int bins_ = 0;
  int steps_ = 0;
  int64_t num_samples_ = 0;
  std::vector<double> values_;
};

struct MelChunk {
  int steps = 0;
  int bins = 0;
  std::vector<double> values;  // steps x bins
};

// Slaney-style triangular filters, n_mels x (n_fft / 2 + 1).
std::vector<std::vector<double>> mel_filterbank(const MelConfig& config);

MelSpectrogram melspectrogram(const Waveform& audio, const MelConfig& config = {});

int mel_window_start(int frame_idx);
MelChunk mel_window_for_frame(const MelSpectrogram& mel, int frame_idx);

}  // namespace hyperlips::media

#endif  // HYPERLIPS_MEDIA_MEL_H_
