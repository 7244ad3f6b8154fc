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

#include "hyperlips/media/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "hyperlips/error.h"
#include "hyperlips/media/media_tool.h"
#include "hyperlips/media/raw_container.h"

namespace hyperlips::media {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t le16(const unsigned char* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::ostream& os, uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  os.write(b, 4);
}
void put16(std::ostream& os, uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

double decode_sample(const unsigned char* p, uint16_t format, uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      uint32_t u = le32(p);
      std::memcpy(&f, &u, 4);
      return f;
    }
    uint64_t u = le32(p) | (static_cast<uint64_t>(le32(p + 4)) << 32);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<int16_t>(le16(p)) / 32768.0;
    case 24: {
      int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default:
      return static_cast<int32_t>(le32(p)) / 2147483648.0;
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

PcmAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kUnreadableMedia, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  require(bytes.size() >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorCode::kUnreadableMedia, path.string() + " is not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const size_t size = le32(chunk + 4);
    const size_t body = pos + 8;
    const size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && avail >= 16) {
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26) format = le16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  require(format != 0, ErrorCode::kUnreadableMedia, path.string() + " has no fmt chunk");
  require(data != nullptr, ErrorCode::kNoAudioTrack, path.string() + " has no data chunk");
  const bool pcm_ok = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  require((pcm_ok || float_ok) && channels > 0 && rate > 0, ErrorCode::kUnreadableMedia,
          path.string() + " uses an unsupported WAV encoding");

  PcmAudio out;
  out.sample_rate = static_cast<int>(rate);
  out.channels = channels;
  const size_t width = bits / 8;
  const size_t count = data_size / width / channels * channels;
  out.interleaved.resize(count);
  for (size_t i = 0; i < count; ++i) out.interleaved[i] = decode_sample(data + i * width, format, bits);
  return out;
}

void write_wav(const std::filesystem::path& path, const Waveform& audio) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::kWriteFailure, "cannot write " + path.string());
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  os.write("RIFF", 4);
  put32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  put32(os, 16);
  put16(os, kFormatPcm);
  put16(os, 1);
  put32(os, static_cast<uint32_t>(audio.sample_rate));
  put32(os, static_cast<uint32_t>(audio.sample_rate) * 2);
  put16(os, 2);
  put16(os, 16);
  os.write("data", 4);
  put32(os, data_bytes);
  for (double s : audio.samples) {
    const long v = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
    put16(os, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  require(static_cast<bool>(os), ErrorCode::kWriteFailure, "short write to " + path.string());
}

std::vector<double> downmix(const PcmAudio& audio) {
  require(audio.channels > 0, ErrorCode::kNoAudioTrack, "audio without channels");
  const size_t frames = audio.interleaved.size() / audio.channels;
  std::vector<double> mono(frames, 0.0);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < audio.channels; ++c) acc += audio.interleaved[i * audio.channels + c];
    mono[i] = acc / audio.channels;
  }
  return mono;
}

std::vector<double> resample(const std::vector<double>& samples, int from_rate, int to_rate) {
  require(from_rate > 0 && to_rate > 0, ErrorCode::kInvalidArgument, "sample rates must be positive");
  if (from_rate == to_rate) return samples;
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const size_t out_len = static_cast<size_t>(std::llround(samples.size() * ratio));
  // Cut-off slightly under the lower Nyquist rate, Hann-tapered kernel.
  const double cutoff = 0.95 * std::min(1.0, ratio);
  constexpr double kZeroCrossings = 24.0;
  const double half_width = kZeroCrossings / cutoff;
  const auto n = static_cast<int64_t>(samples.size());
  std::vector<double> out(out_len, 0.0);
  for (size_t j = 0; j < out_len; ++j) {
    const double centre = j / ratio;
    const int64_t lo = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(centre - half_width)));
    const int64_t hi = std::min<int64_t>(n - 1, static_cast<int64_t>(std::floor(centre + half_width)));
    double acc = 0.0;
    for (int64_t k = lo; k <= hi; ++k) {
      const double u = centre - k;
      const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * u / half_width);
      acc += samples[k] * cutoff * sinc(cutoff * u) * taper;
    }
    out[j] = acc;
  }
  return out;
}

Waveform normalize_audio(const PcmAudio& audio) {
  Waveform w;
  w.sample_rate = kSampleRate;
  w.samples = resample(downmix(audio), audio.sample_rate, kSampleRate);
  for (double& s : w.samples) {
    require(std::isfinite(s), ErrorCode::kUnreadableMedia, "audio contains non-finite samples");
    s = std::clamp(s, -1.0, 1.0);
  }
  return w;
}

Waveform load_audio(const std::filesystem::path& path) {
  require(std::filesystem::is_regular_file(path), ErrorCode::kUnreadableMedia,
          "no such file: " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == ".wav") return normalize_audio(read_wav(path));
  if (is_raw_clip_path(path)) {
    RawClip clip = read_raw_clip(path);
    require(clip.sample_rate > 0, ErrorCode::kNoAudioTrack, path.string() + " has no audio");
    return normalize_audio(PcmAudio{clip.sample_rate, 1, std::move(clip.samples)});
  }
  return MediaTool().decode_audio(path);
}

}  // namespace hyperlips::media
