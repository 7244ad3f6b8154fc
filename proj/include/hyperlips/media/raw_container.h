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

#ifndef HYPERLIPS_MEDIA_RAW_CONTAINER_H_
#define HYPERLIPS_MEDIA_RAW_CONTAINER_H_

#include <filesystem>
#include <vector>

#include "hyperlips/image.h"

namespace hyperlips::media {

// Uncompressed ".hlv" clip: RGB8 frames plus 16-bit mono PCM.
struct RawClip {
  double fps = 25.0;
  std::vector<RgbFrame> frames;
  int sample_rate = 0;
  std::vector<double> samples;
};

bool is_raw_clip_path(const std::filesystem::path& path);
RawClip read_raw_clip(const std::filesystem::path& path);
void write_raw_clip(const std::filesystem::path& path, const RawClip& clip);

}  // namespace hyperlips::media

#endif  // HYPERLIPS_MEDIA_RAW_CONTAINER_H_
