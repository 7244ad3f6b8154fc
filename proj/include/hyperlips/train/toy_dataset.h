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

#ifndef HYPERLIPS_TRAIN_TOY_DATASET_H_
#define HYPERLIPS_TRAIN_TOY_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hyperlips/face/face_ops.h"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"
#include "hyperlips/media/audio.h"
#include "hyperlips/rng.h"

namespace hyperlips::train {

inline constexpr std::string_view kToyDatasetFormat = "hyperlips-toy-v1";

struct ToyClipSpec {
  int frame_size = 96;
  double duration = 2.0;
  bool silent = false;
};

// One synthetic talking clip. The mouth opening of frame i is the RMS of
// the audio under that frame divided by the clip's loudest frame RMS.
struct ToyClip {
  std::vector<RgbFrame> frames;
  media::Waveform audio;
  std::vector<double> openings;
  // Outer lip box height in frame pixels.
  std::vector<double> mouth_heights;
  std::vector<face::FaceBox> boxes;
  // Frame pixel coordinates (image_size = frame width).
  std::vector<face::LandmarkSet> landmarks;
};

// Per-frame RMS over consecutive 1/25 s spans of 16 kHz audio.
std::vector<double> frame_rms(const media::Waveform& audio, int frames);

ToyClip synthesize_toy_clip(const ToyClipSpec& spec, Rng& rng);

struct ToyDatasetOptions {
  int clips = 32;
  uint64_t seed = 0;
  ToyClipSpec clip;
};

// Writes clip_NNN.hlv (frames + audio), clip_NNN.wav, clip_NNN.json (ground
// truth) and dataset.json into `out_dir`. Clip k uses child stream k of the
// seed, so datasets are bit-identical for equal options.
void make_toy_dataset(const ToyDatasetOptions& options, const std::filesystem::path& out_dir);

}  // namespace hyperlips::train

#endif  // HYPERLIPS_TRAIN_TOY_DATASET_H_
