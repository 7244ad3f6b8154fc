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

#ifndef HYPERLIPS_TRAIN_DATASET_H_
#define HYPERLIPS_TRAIN_DATASET_H_

#include <filesystem>
#include <string>
#include <vector>

#include "hyperlips/face/detector.h"
#include "hyperlips/face/face_ops.h"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"
#include "hyperlips/media/mel.h"

namespace hyperlips::train {

// A directory with dataset.json listing clips stored as <name>.hlv video,
// <name>.wav audio and optional <name>.json ground truth.
struct DatasetIndex {
  std::filesystem::path root;
  std::vector<std::string> clips;

  std::filesystem::path video(const std::string& clip) const { return root / (clip + ".hlv"); }
  std::filesystem::path audio(const std::string& clip) const { return root / (clip + ".wav"); }
  std::filesystem::path truth(const std::string& clip) const { return root / (clip + ".json"); }
};

// EmptyDataset when the index is missing or lists no clips.
DatasetIndex load_dataset(const std::filesystem::path& dir);

struct ClipTruth {
  std::vector<double> openings;
  std::vector<double> mouth_heights;
  std::vector<face::FaceBox> boxes;
  // Frame pixel coordinates.
  std::vector<face::LandmarkSet> landmarks;
};

ClipTruth load_clip_truth(const std::filesystem::path& path);

// Frames, tracked face boxes, face crops and per-frame mel chunks, trimmed
// to the shorter of the video and the audio.
struct PreparedClip {
  std::string name;
  std::vector<RgbFrame> frames;
  std::vector<face::FaceBox> boxes;
  std::vector<Image> faces;
  media::MelSpectrogram mel;
  std::vector<media::MelChunk> chunks;

  int size() const { return static_cast<int>(faces.size()); }
};

// Frames where detection fails borrow the nearest tracked box; NoFace when
// no frame has a face.
PreparedClip prepare_clip(const std::string& name, const std::filesystem::path& video,
                          const std::filesystem::path& audio, int crop_size,
                          const face::FaceDetector& detector);

std::vector<PreparedClip> prepare_dataset(const DatasetIndex& index, int crop_size,
                                          const face::FaceDetector& detector);

}  // namespace hyperlips::train

#endif  // HYPERLIPS_TRAIN_DATASET_H_
