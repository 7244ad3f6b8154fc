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

#include "hyperlips/media/raw_container.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hyperlips/error.h"

namespace hyperlips::media {
namespace {

constexpr char kMagic[4] = {'H', 'L', 'V', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(is), ErrorCode::kUnreadableMedia, path.string() + " is truncated");
  return v;
}

}  // namespace

bool is_raw_clip_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext == ".hlv";
}

RawClip read_raw_clip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kUnreadableMedia, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  require(in && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::kUnreadableMedia,
          path.string() + " is not a raw clip");
  const auto width = get<uint32_t>(in, path);
  const auto height = get<uint32_t>(in, path);
  RawClip clip;
  clip.fps = get<double>(in, path);
  const auto frame_count = get<uint32_t>(in, path);
  clip.sample_rate = static_cast<int>(get<uint32_t>(in, path));
  const auto sample_count = get<uint64_t>(in, path);
  require(std::isfinite(clip.fps) && clip.fps > 0 && width > 0 && height > 0 &&
              width <= 16384 && height <= 16384,
          ErrorCode::kUnreadableMedia, path.string() + " has an invalid header");

  clip.frames.reserve(frame_count);
  for (uint32_t f = 0; f < frame_count; ++f) {
    RgbFrame frame(static_cast<int>(width), static_cast<int>(height));
    in.read(reinterpret_cast<char*>(frame.rgb.data()), static_cast<std::streamsize>(frame.rgb.size()));
    require(static_cast<bool>(in), ErrorCode::kUnreadableMedia, path.string() + " is truncated");
    clip.frames.push_back(std::move(frame));
  }
  std::vector<int16_t> pcm(sample_count);
  in.read(reinterpret_cast<char*>(pcm.data()), static_cast<std::streamsize>(pcm.size() * 2));
  require(static_cast<bool>(in), ErrorCode::kUnreadableMedia, path.string() + " is truncated");
  clip.samples.resize(sample_count);
  for (size_t i = 0; i < pcm.size(); ++i) clip.samples[i] = pcm[i] / 32768.0;
  return clip;
}

void write_raw_clip(const std::filesystem::path& path, const RawClip& clip) {
  require(!clip.frames.empty() || clip.sample_rate > 0, ErrorCode::kWriteFailure,
          "refusing to write an empty clip");
  const int width = clip.frames.empty() ? 1 : clip.frames.front().width;
  const int height = clip.frames.empty() ? 1 : clip.frames.front().height;
  for (const auto& f : clip.frames)
    require(f.width == width && f.height == height, ErrorCode::kShapeMismatch,
            "raw clip frames differ in size");
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::kWriteFailure, "cannot write " + path.string());
  os.write(kMagic, 4);
  put<uint32_t>(os, static_cast<uint32_t>(width));
  put<uint32_t>(os, static_cast<uint32_t>(height));
  put<double>(os, clip.fps);
  put<uint32_t>(os, static_cast<uint32_t>(clip.frames.size()));
  put<uint32_t>(os, static_cast<uint32_t>(clip.sample_rate));
  put<uint64_t>(os, clip.samples.size());
  for (const auto& f : clip.frames)
    os.write(reinterpret_cast<const char*>(f.rgb.data()), static_cast<std::streamsize>(f.rgb.size()));
  for (double s : clip.samples)
    put<int16_t>(os, static_cast<int16_t>(std::clamp(std::lround(s * 32768.0), -32768L, 32767L)));
  require(static_cast<bool>(os), ErrorCode::kWriteFailure, "short write to " + path.string());
}

}  // namespace hyperlips::media
