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

#ifndef HYPERLIPS_MODEL_SYNC_EXPERT_H_
#define HYPERLIPS_MODEL_SYNC_EXPERT_H_

#include <memory>
#include <span>
#include <vector>

#include "hyperlips/image.h"
#include "hyperlips/media/mel.h"
#include "hyperlips/model/profile.h"
#include "hyperlips/nn/layers.h"
#include "hyperlips/nn/module.h"

namespace hyperlips::model {

// Conv stack ending in a non-negative unit-norm embedding.
class SyncEncoder : public nn::Module {
 public:
  SyncEncoder(int64_t in_channels, const std::array<int64_t, 4>& channels, int64_t dim, Rng& rng);
  nn::Tensor forward(const nn::Tensor& x) const;

 private:
  std::unique_ptr<nn::ConvAct> stem_;
  std::vector<std::unique_ptr<nn::ConvAct>> down_;
  std::unique_ptr<nn::Linear> head_;
};

// Audio and video embedders whose cosine similarity scores lip sync.
class SyncExpert : public nn::Module {
 public:
  SyncExpert(const ModelProfile& profile, Rng& rng);

  const ModelProfile& profile() const { return profile_; }

  // mel: [N, 1, 16, 80] -> [N, D].
  nn::Tensor embed_audio(const nn::Tensor& mel) const;
  // window: [N, 15, S/2, S] -> [N, D].
  nn::Tensor embed_video(const nn::Tensor& window) const;

 private:
  ModelProfile profile_;
  SyncEncoder audio_;
  SyncEncoder video_;
};

// Row-wise cosine similarity of two [N, D] batches, in [-1, 1].
nn::Tensor sync_distance(const nn::Tensor& audio, const nn::Tensor& video);
double sync_distance(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr int kLseMaxOffset = 15;

struct LseScores {
  // Median minus minimum of the per-offset mean distances; higher is better.
  double confidence = 0.0;
  // Minimum over offsets of the mean embedding distance; lower is better.
  double distance = 0.0;
  // Audio offset in frames at the minimum.
  int offset = 0;
};

// Scores from per-window embeddings: row k of `video` embeds frames
// [k, k + 5) and row k of `audio` the chunk aligned with frame k. For every
// offset o in [-15, 15] the Euclidean distance |video_k - audio_{k+o}| is
// averaged over the windows where k + o is valid.
LseScores lse_from_embeddings(const nn::Tensor& audio, const nn::Tensor& video);

// Embeds every 5-frame window of `faces` (profile-sized crops) and the
// matching mel chunks; faces[0] is video frame `first_frame`. NotEnoughFrames
// below 5 usable frames.
LseScores lse_scores(const SyncExpert& expert, std::span<const Image> faces,
                     const media::MelSpectrogram& mel, int first_frame = 0);

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_SYNC_EXPERT_H_
