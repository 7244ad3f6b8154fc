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

#ifndef HYPERLIPS_MEDIA_MEDIA_TOOL_H_
#define HYPERLIPS_MEDIA_MEDIA_TOOL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "hyperlips/image.h"
#include "hyperlips/media/audio.h"

namespace hyperlips::media {

// Subprocess bridge to an ffmpeg-compatible binary. Frames travel as raw
// rgb24 over a pipe and audio as s16le PCM.
class MediaTool {
 public:
  // Uses $HLIPS_MEDIA_TOOL when set, "ffmpeg" otherwise.
  MediaTool();
  explicit MediaTool(std::string binary) : binary_(std::move(binary)) {}

  const std::string& binary() const { return binary_; }
  bool available() const;

  struct StreamInfo {
    bool has_video = false;
    bool has_audio = false;
  };
  StreamInfo probe(const std::filesystem::path& path) const;

  // Frames resampled to 25 fps by the tool.
  std::vector<RgbFrame> decode_frames(const std::filesystem::path& path) const;
  // Mono 16 kHz.
  Waveform decode_audio(const std::filesystem::path& path) const;
  void encode(const std::vector<RgbFrame>& frames, int fps, const Waveform& audio,
              const std::filesystem::path& path) const;

 private:
  std::string binary_;
};

std::string shell_quote(const std::string& s);

// Scratch directory for intermediate media, $HLIPS_CACHE_DIR or the system
// temporary directory.
std::filesystem::path scratch_dir();

}  // namespace hyperlips::media

#endif  // HYPERLIPS_MEDIA_MEDIA_TOOL_H_
