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

#include "hyperlips/media/video.h"

#include <cmath>
#include <cstdlib>

#include "hyperlips/error.h"
#include "hyperlips/media/media_tool.h"
#include "hyperlips/media/raw_container.h"

namespace hyperlips::media {

std::vector<double> FrameStream::timestamps() const {
  std::vector<double> t(frames.size());
  for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / fps;
  return t;
}

std::vector<RgbFrame> resample_to_25fps(std::vector<RgbFrame> frames, double source_fps) {
  require(source_fps > 0.0, ErrorCode::kUnreadableMedia, "non-positive frame rate");
  if (frames.empty() || std::abs(source_fps - 25.0) < 1e-9) return frames;
  const auto n = static_cast<int64_t>(frames.size());
  const int64_t out_count = std::llround(static_cast<double>(n) / source_fps * 25.0);
  std::vector<RgbFrame> out;
  out.reserve(static_cast<size_t>(out_count));
  for (int64_t j = 0; j < out_count; ++j) {
    const auto src = static_cast<int64_t>(std::floor(j * source_fps / 25.0 + 1e-9));
    out.push_back(frames[static_cast<size_t>(std::min(src, n - 1))]);
  }
  return out;
}

FrameStream extract_frames(const std::filesystem::path& path) {
  require(std::filesystem::is_regular_file(path), ErrorCode::kUnreadableMedia,
          "no such file: " + path.string());
  FrameStream stream;
  if (is_raw_clip_path(path)) {
    RawClip clip = read_raw_clip(path);
    require(!clip.frames.empty(), ErrorCode::kUnreadableMedia, path.string() + " has no frames");
    stream.frames = resample_to_25fps(std::move(clip.frames), clip.fps);
  } else {
    stream.frames = MediaTool().decode_frames(path);
  }
  return stream;
}

void write_video(const FrameStream& stream, const Waveform& audio,
                 const std::filesystem::path& path) {
  require(!stream.frames.empty(), ErrorCode::kWriteFailure, "no frames to write");
  require(stream.fps == 25, ErrorCode::kInvalidArgument, "frame stream is not 25 fps");
  require(audio.sample_rate == kSampleRate, ErrorCode::kInvalidArgument, "audio is not 16 kHz");
  const auto expected = std::llround(audio.duration() * stream.fps);
  const auto actual = static_cast<long long>(stream.frames.size());
  require(std::llabs(actual - expected) <= 1, ErrorCode::kDurationMismatch,
          std::to_string(actual) + " frames do not match " + std::to_string(audio.duration()) +
              " s of audio");
  const RgbFrame& first = stream.frames.front();
  for (const auto& f : stream.frames)
    require(f.width == first.width && f.height == first.height, ErrorCode::kShapeMismatch,
            "frames differ in size");
  require(!path.has_parent_path() || std::filesystem::is_directory(path.parent_path()),
          ErrorCode::kWriteFailure, "output directory does not exist: " + path.string());

  if (is_raw_clip_path(path)) {
    write_raw_clip(path, RawClip{static_cast<double>(stream.fps), stream.frames, audio.sample_rate,
                                 audio.samples});
  } else {
    MediaTool().encode(stream.frames, stream.fps, audio, path);
  }
}

}  // namespace hyperlips::media
