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

#include "hyperlips/media/media_tool.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "hyperlips/error.h"

namespace hyperlips::media {
namespace {

// Removes the file on scope exit.
class ScratchFile {
 public:
  explicit ScratchFile(const std::string& suffix) {
    static std::atomic<int> counter{0};
    path_ = scratch_dir() / ("hlips_" + std::to_string(::getpid()) + "_" +
                             std::to_string(counter++) + suffix);
  }
  ~ScratchFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  ScratchFile(const ScratchFile&) = delete;
  ScratchFile& operator=(const ScratchFile&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string read() const {
    std::ifstream in(path_, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  std::filesystem::path path_;
};

// Ignores SIGPIPE so a child that exits early surfaces as a write error.
class SigpipeGuard {
 public:
  SigpipeGuard() { previous_ = std::signal(SIGPIPE, SIG_IGN); }
  ~SigpipeGuard() { std::signal(SIGPIPE, previous_); }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  void (*previous_)(int);
};

struct ProcessResult {
  int status = -1;
  std::string out;
  std::string err;
};

int exit_status(int raw) { return raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : -1); }

ProcessResult run_reading(const std::string& command) {
  ScratchFile err(".log");
  const std::string full = command + " 2>" + shell_quote(err.path().string());
  ProcessResult result;
  FILE* pipe = ::popen(full.c_str(), "r");
  require(pipe != nullptr, ErrorCode::kUnreadableMedia, "cannot start media tool");
  char buf[1 << 16];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  result.status = exit_status(::pclose(pipe));
  result.err = err.read();
  return result;
}

ProcessResult run_writing(const std::string& command, const std::vector<RgbFrame>& frames) {
  ScratchFile err(".log");
  const std::string full = command + " 2>" + shell_quote(err.path().string());
  SigpipeGuard guard;
  ProcessResult result;
  FILE* pipe = ::popen(full.c_str(), "w");
  require(pipe != nullptr, ErrorCode::kWriteFailure, "cannot start media tool");
  bool ok = true;
  for (const auto& f : frames) {
    if (std::fwrite(f.rgb.data(), 1, f.rgb.size(), pipe) != f.rgb.size()) {
      ok = false;
      break;
    }
  }
  result.status = exit_status(::pclose(pipe));
  if (!ok && result.status == 0) result.status = -1;
  result.err = err.read();
  return result;
}

std::string tail(const std::string& s, size_t n = 400) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext;
}

}  // namespace

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::filesystem::path scratch_dir() {
  if (const char* dir = std::getenv("HLIPS_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    std::filesystem::create_directories(dir);
    return dir;
  }
  return std::filesystem::temp_directory_path();
}

MediaTool::MediaTool() {
  const char* env = std::getenv("HLIPS_MEDIA_TOOL");
  binary_ = (env != nullptr && *env != '\0') ? env : "ffmpeg";
}

bool MediaTool::available() const {
  try {
    return run_reading(shell_quote(binary_) + " -hide_banner -version").status == 0;
  } catch (const Error&) {
    return false;
  }
}

MediaTool::StreamInfo MediaTool::probe(const std::filesystem::path& path) const {
  require(std::filesystem::is_regular_file(path), ErrorCode::kUnreadableMedia,
          "no such file: " + path.string());
  const auto r = run_reading(shell_quote(binary_) + " -hide_banner -nostdin -i " +
                             shell_quote(path.string()));
  const size_t input = r.err.find("Input #0");
  require(input != std::string::npos, ErrorCode::kUnreadableMedia,
          "media tool cannot read " + path.string() + ": " + tail(r.err));
  static const std::regex video(R"(Stream #0:\d+.*: Video: )");
  static const std::regex audio(R"(Stream #0:\d+.*: Audio: )");
  StreamInfo info;
  info.has_video = std::regex_search(r.err, video);
  info.has_audio = std::regex_search(r.err, audio);
  return info;
}

std::vector<RgbFrame> MediaTool::decode_frames(const std::filesystem::path& path) const {
  const StreamInfo info = probe(path);
  require(info.has_video, ErrorCode::kUnreadableMedia, path.string() + " has no video stream");
  const auto r = run_reading(shell_quote(binary_) + " -hide_banner -nostdin -i " +
                             shell_quote(path.string()) +
                             " -an -vf fps=25 -f rawvideo -pix_fmt rgb24 pipe:1");
  require(r.status == 0, ErrorCode::kUnreadableMedia,
          "media tool failed on " + path.string() + ": " + tail(r.err));
  const size_t output = r.err.find("Output #0");
  std::smatch m;
  static const std::regex dims(R"(, (\d+)x(\d+))");
  const std::string after = output == std::string::npos ? "" : r.err.substr(output);
  require(std::regex_search(after, m, dims), ErrorCode::kUnreadableMedia,
          "cannot determine frame size of " + path.string());
  const int w = std::stoi(m[1]), h = std::stoi(m[2]);
  const size_t frame_bytes = static_cast<size_t>(w) * h * 3;
  require(frame_bytes > 0 && r.out.size() % frame_bytes == 0, ErrorCode::kUnreadableMedia,
          "decoded stream of " + path.string() + " is not a whole number of frames");
  std::vector<RgbFrame> frames;
  for (size_t off = 0; off < r.out.size(); off += frame_bytes) {
    RgbFrame f(w, h);
    std::copy_n(r.out.data() + off, frame_bytes, reinterpret_cast<char*>(f.rgb.data()));
    frames.push_back(std::move(f));
  }
  require(!frames.empty(), ErrorCode::kUnreadableMedia, path.string() + " decoded to no frames");
  return frames;
}

Waveform MediaTool::decode_audio(const std::filesystem::path& path) const {
  const StreamInfo info = probe(path);
  require(info.has_audio, ErrorCode::kNoAudioTrack, path.string() + " has no audio track");
  const auto r = run_reading(shell_quote(binary_) + " -hide_banner -nostdin -i " +
                             shell_quote(path.string()) + " -vn -ac 1 -ar " +
                             std::to_string(kSampleRate) + " -f s16le pipe:1");
  require(r.status == 0, ErrorCode::kUnreadableMedia,
          "media tool failed on " + path.string() + ": " + tail(r.err));
  Waveform w;
  w.samples.resize(r.out.size() / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const auto lo = static_cast<unsigned char>(r.out[2 * i]);
    const auto hi = static_cast<unsigned char>(r.out[2 * i + 1]);
    w.samples[i] = static_cast<int16_t>(lo | (hi << 8)) / 32768.0;
  }
  return w;
}

void MediaTool::encode(const std::vector<RgbFrame>& frames, int fps, const Waveform& audio,
                       const std::filesystem::path& path) const {
  require(!frames.empty(), ErrorCode::kWriteFailure, "no frames to encode");
  ScratchFile wav(".wav");
  write_wav(wav.path(), audio);
  const std::string ext = lower_ext(path);
  std::string codec;
  if (ext == ".mp4" || ext == ".mov" || ext == ".m4v")
    codec = " -c:v libx264 -crf 12 -pix_fmt yuv420p -vf 'pad=ceil(iw/2)*2:ceil(ih/2)*2' -c:a aac";
  else if (ext == ".mkv" || ext == ".avi" || ext == ".nut")
    codec = " -c:v ffv1 -c:a pcm_s16le";
  const std::string cmd = shell_quote(binary_) + " -y -hide_banner -loglevel error" +
                          " -f rawvideo -pix_fmt rgb24 -s " + std::to_string(frames[0].width) +
                          "x" + std::to_string(frames[0].height) + " -framerate " +
                          std::to_string(fps) + " -i pipe:0 -i " + shell_quote(wav.path().string()) +
                          " -map 0:v -map 1:a" + codec + " " + shell_quote(path.string());
  const auto r = run_writing(cmd, frames);
  require(r.status == 0, ErrorCode::kWriteFailure,
          "media tool could not write " + path.string() + ": " + tail(r.err));
}

}  // namespace hyperlips::media
