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

#include "hyperlips/train/toy_dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "hyperlips/error.h"
#include "hyperlips/face/toy_face.h"
#include "hyperlips/media/mel.h"
#include "hyperlips/media/raw_container.h"

namespace hyperlips::train {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamplesPerFrame = media::kSampleRate / media::kVideoFps;

// Syllable-like amplitude envelope: half-sine bursts of random length and
// loudness separated by random pauses.
std::vector<double> syllable_envelope(int64_t n, Rng& rng) {
  std::vector<double> env(n, 0.0);
  int64_t t = 0;
  while (t < n) {
    const auto len = static_cast<int64_t>(rng.uniform(0.08, 0.3) * media::kSampleRate);
    const double amp = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.25, 1.0);
    for (int64_t k = 0; k < len && t + k < n; ++k)
      env[t + k] = amp * std::sin(kPi * static_cast<double>(k) / static_cast<double>(len));
    t += len;
  }
  return env;
}

std::vector<double> voiced_carrier(int64_t n, Rng& rng) {
  const double f0 = rng.uniform(100.0, 220.0);
  const double vibrato = rng.uniform(2.0, 6.0);
  double phase[4];
  for (double& p : phase) p = rng.uniform(0.0, 2 * kPi);
  std::vector<double> out(n);
  double theta = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / media::kSampleRate;
    theta += 2 * kPi * f0 * (1.0 + 0.02 * std::sin(2 * kPi * vibrato * t)) / media::kSampleRate;
    double v = 0.3 * rng.uniform(-1.0, 1.0);
    for (int h = 0; h < 4; ++h) v += std::sin((h + 1) * theta + phase[h]) / (h + 1);
    out[i] = v / 2.4;
  }
  return out;
}

nlohmann::json point_list(const face::LandmarkSet& lm) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : lm.points) {
    if (p.missing())
      pts.push_back(nullptr);
    else
      pts.push_back({p.x, p.y});
  }
  return pts;
}

}  // namespace

std::vector<double> frame_rms(const media::Waveform& audio, int frames) {
  std::vector<double> rms(frames, 0.0);
  const auto n = static_cast<int64_t>(audio.samples.size());
  for (int i = 0; i < frames; ++i) {
    const int64_t begin = static_cast<int64_t>(i) * kSamplesPerFrame;
    const int64_t end = std::min<int64_t>(begin + kSamplesPerFrame, n);
    double acc = 0.0;
    for (int64_t k = begin; k < end; ++k) acc += audio.samples[k] * audio.samples[k];
    rms[i] = end > begin ? std::sqrt(acc / static_cast<double>(end - begin)) : 0.0;
  }
  return rms;
}

ToyClip synthesize_toy_clip(const ToyClipSpec& spec, Rng& rng) {
  require(spec.frame_size >= 32 && spec.duration > 0.0, ErrorCode::kInvalidArgument,
          "toy clips need frame_size >= 32 and a positive duration");
  ToyClip clip;
  const auto n = static_cast<int64_t>(std::lround(spec.duration * media::kSampleRate));
  const std::vector<double> env = syllable_envelope(n, rng);
  const std::vector<double> carrier = voiced_carrier(n, rng);
  clip.audio.sample_rate = media::kSampleRate;
  clip.audio.samples.resize(n);
  for (int64_t i = 0; i < n; ++i)
    clip.audio.samples[i] = spec.silent ? 0.0 : 0.5 * env[i] * carrier[i];

  const int frames = static_cast<int>(std::lround(static_cast<double>(n) * media::kVideoFps /
                                                  media::kSampleRate));
  const std::vector<double> rms = frame_rms(clip.audio, frames);
  const double peak = *std::max_element(rms.begin(), rms.end());
  const face::ToyAppearance look = face::random_appearance(rng);
  const double s = spec.frame_size;
  const double radius = rng.uniform(0.3, 0.36) * s;
  const double cx = s / 2 + rng.uniform(-3.0, 3.0), cy = s / 2 + rng.uniform(-3.0, 3.0);
  const double drift_phase = rng.uniform(0.0, 2 * kPi);

  for (int i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / media::kVideoFps;
    face::ToyPose pose;
    pose.cx = cx + std::sin(kPi * t + drift_phase);
    pose.cy = cy + std::cos(kPi * t + drift_phase);
    pose.radius = radius;
    pose.opening = peak > 0.0 ? std::clamp(rms[i] / peak, 0.0, 1.0) : 0.0;
    face::ToyFrame tf = face::render_toy_frame(spec.frame_size, spec.frame_size, look, pose);
    face::LandmarkSet lm = tf.landmarks;
    for (auto& p : lm.points)
      if (!p.missing()) p = {p.x + tf.box.x, p.y + tf.box.y};
    lm.image_size = spec.frame_size;
    clip.openings.push_back(pose.opening);
    clip.mouth_heights.push_back(face::lip_height(lm));
    clip.boxes.push_back(tf.box);
    clip.landmarks.push_back(std::move(lm));
    clip.frames.push_back(std::move(tf.frame));
  }
  return clip;
}

void make_toy_dataset(const ToyDatasetOptions& options, const std::filesystem::path& out_dir) {
  require(options.clips >= 1, ErrorCode::kInvalidArgument, "need at least one toy clip");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec && std::filesystem::is_directory(out_dir), ErrorCode::kWriteFailure,
          "cannot create " + out_dir.string());
  Rng root(options.seed);
  nlohmann::json names = nlohmann::json::array();
  for (int k = 0; k < options.clips; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%03d", k);
    Rng rng = root.fork(static_cast<uint64_t>(k));
    const ToyClip clip = synthesize_toy_clip(options.clip, rng);

    media::RawClip raw{static_cast<double>(media::kVideoFps), clip.frames, media::kSampleRate,
                       clip.audio.samples};
    media::write_raw_clip(out_dir / (std::string(name) + ".hlv"), raw);
    media::write_wav(out_dir / (std::string(name) + ".wav"), clip.audio);

    nlohmann::json truth = {{"frames", clip.frames.size()},
                            {"openings", clip.openings},
                            {"mouth_heights", clip.mouth_heights},
                            {"landmark_schema", face::kToyFaceSchema}};
    nlohmann::json boxes = nlohmann::json::array(), landmarks = nlohmann::json::array();
    for (size_t i = 0; i < clip.frames.size(); ++i) {
      const auto& b = clip.boxes[i];
      boxes.push_back({b.x, b.y, b.w, b.h});
      landmarks.push_back(point_list(clip.landmarks[i]));
    }
    truth["boxes"] = std::move(boxes);
    truth["landmarks"] = std::move(landmarks);
    std::ofstream f(out_dir / (std::string(name) + ".json"), std::ios::trunc);
    f << truth.dump() << '\n';
    require(f.good(), ErrorCode::kWriteFailure, "cannot write ground truth for " + std::string(name));
    names.push_back(name);
  }
  const nlohmann::json index = {{"format", kToyDatasetFormat},
                                {"seed", options.seed},
                                {"frame_size", options.clip.frame_size},
                                {"duration", options.clip.duration},
                                {"clips", names}};
  std::ofstream f(out_dir / "dataset.json", std::ios::trunc);
  f << index.dump(2) << '\n';
  require(f.good(), ErrorCode::kWriteFailure, "cannot write dataset index");
}

}  // namespace hyperlips::train
