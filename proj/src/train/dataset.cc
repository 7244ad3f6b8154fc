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

#include "hyperlips/train/dataset.h"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "hyperlips/error.h"
#include "hyperlips/media/audio.h"
#include "hyperlips/media/video.h"

namespace hyperlips::train {

DatasetIndex load_dataset(const std::filesystem::path& dir) {
  std::ifstream f(dir / "dataset.json");
  require(f.good(), ErrorCode::kEmptyDataset, "no dataset.json in " + dir.string());
  DatasetIndex index;
  index.root = dir;
  try {
    const auto j = nlohmann::json::parse(f);
    index.clips = j.at("clips").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kEmptyDataset, "unreadable dataset index in " + dir.string() + ": " + e.what());
  }
  require(!index.clips.empty(), ErrorCode::kEmptyDataset, dir.string() + " lists no clips");
  return index;
}

ClipTruth load_clip_truth(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::kInvalidArgument, "cannot read " + path.string());
  ClipTruth truth;
  try {
    const auto j = nlohmann::json::parse(f);
    truth.openings = j.at("openings").get<std::vector<double>>();
    truth.mouth_heights = j.at("mouth_heights").get<std::vector<double>>();
    for (const auto& b : j.at("boxes")) truth.boxes.push_back({b[0], b[1], b[2], b[3]});
    for (const auto& frame : j.at("landmarks")) {
      face::LandmarkSet lm;
      for (const auto& p : frame)
        lm.points.push_back(p.is_null() ? face::missing_point()
                                        : face::Point{p[0].get<double>(), p[1].get<double>()});
      truth.landmarks.push_back(std::move(lm));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, "malformed ground truth " + path.string() + ": " + e.what());
  }
  return truth;
}

PreparedClip prepare_clip(const std::string& name, const std::filesystem::path& video,
                          const std::filesystem::path& audio, int crop_size,
                          const face::FaceDetector& detector) {
  PreparedClip clip;
  clip.name = name;
  clip.frames = media::extract_frames(video).frames;
  clip.mel = media::melspectrogram(media::load_audio(audio));
  const size_t n = std::min<size_t>(clip.frames.size(), clip.mel.frame_count());
  clip.frames.resize(n);
  const auto track = face::track_faces(clip.frames, detector);
  for (size_t i = 0; i < n; ++i) {
    std::optional<face::FaceBox> box;
    for (size_t d = 0; d < n && !box; ++d) {
      if (i >= d && track[i - d]) box = track[i - d];
      else if (i + d < n && track[i + d]) box = track[i + d];
    }
    require(box.has_value(), ErrorCode::kNoFace, "no face anywhere in " + video.string());
    clip.boxes.push_back(*box);
    clip.faces.push_back(face::crop_face(clip.frames[i], *box, crop_size));
    clip.chunks.push_back(media::mel_window_for_frame(clip.mel, static_cast<int>(i)));
  }
  return clip;
}

std::vector<PreparedClip> prepare_dataset(const DatasetIndex& index, int crop_size,
                                          const face::FaceDetector& detector) {
  std::vector<PreparedClip> clips;
  for (const auto& name : index.clips)
    clips.push_back(prepare_clip(name, index.video(name), index.audio(name), crop_size, detector));
  return clips;
}

}  // namespace hyperlips::train
