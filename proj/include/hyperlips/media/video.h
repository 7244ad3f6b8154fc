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

#ifndef HYPERLIPS_MEDIA_VIDEO_H_
#define HYPERLIPS_MEDIA_VIDEO_H_

#include <filesystem>
#include <vector>

#include "hyperlips/image.h"
#include "hyperlips/media/audio.h"

namespace hyperlips::media {

struct FrameStream {
  std::vector<RgbFrame> frames;
  int fps = 25;

  double duration() const { return static_cast<double>(frames.size()) / fps; }
  std::vector<double> timestamps() const;
};

// Picks, for every 25 fps output tick, the source frame on screen at that
// time. The output has round(duration * 25) frames.
std::vector<RgbFrame> resample_to_25fps(std::vector<RgbFrame> frames, double source_fps);

FrameStream extract_frames(const std::filesystem::path& path);

// Fails with DurationMismatch unless the frame count is within one frame of
// the audio duration at 25 fps.
void write_video(const FrameStream& stream, const Waveform& audio,
                 const std::filesystem::path& path);

}  // namespace hyperlips::media

#endif  // HYPERLIPS_MEDIA_VIDEO_H_
