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

#ifndef HYPERLIPS_MEDIA_AUDIO_H_
#define HYPERLIPS_MEDIA_AUDIO_H_

#include <filesystem>
#include <vector>

namespace hyperlips::media {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Decoded PCM before normalisation to the pipeline rate.
struct PcmAudio {
  int sample_rate = 0;
  int channels = 0;
  std::vector<double> interleaved;
};

PcmAudio read_wav(const std::filesystem::path& path);
// Writes 16-bit PCM, clipping to [-1, 1].
void write_wav(const std::filesystem::path& path, const Waveform& audio);

std::vector<double> downmix(const PcmAudio& audio);

// Windowed-sinc band-limited resampling.
std::vector<double> resample(const std::vector<double>& samples, int from_rate, int to_rate);

// Mono, 16 kHz, clipped to [-1, 1]. Handles .wav and .hlv natively and
// delegates every other container to the external media tool.
Waveform load_audio(const std::filesystem::path& path);

// Applies the downmix/resample/clip contract to already decoded audio.
Waveform normalize_audio(const PcmAudio& audio);

}  // namespace hyperlips::media

#endif  // HYPERLIPS_MEDIA_AUDIO_H_
