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

#include "hyperlips/model/sync_expert.h"

#include <algorithm>
#include <cmath>

#include "hyperlips/error.h"
#include "hyperlips/model/inputs.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::model {
namespace {

constexpr double kSlope = 0.01;

}  // namespace

SyncEncoder::SyncEncoder(int64_t in_channels, const std::array<int64_t, 4>& channels, int64_t dim,
                         Rng& rng) {
  stem_ = std::make_unique<nn::ConvAct>(in_channels, channels[0], 3, 1, 1, kSlope, rng);
  register_module("stem", *stem_);
  int64_t prev = channels[0];
  for (int i = 0; i < 4; ++i) {
    down_.push_back(std::make_unique<nn::ConvAct>(prev, channels[i], 3, 2, 1, kSlope, rng));
    register_module("down" + std::to_string(i), *down_.back());
    prev = channels[i];
  }
  head_ = std::make_unique<nn::Linear>(prev, dim, rng, 0.0);
  register_module("head", *head_);
}

nn::Tensor SyncEncoder::forward(const nn::Tensor& x) const {
  nn::Tensor h = stem_->forward(x);
  for (const auto& d : down_) h = d->forward(h);
  return nn::l2_normalize(nn::relu(head_->forward(nn::global_avg_pool(h))));
}

SyncExpert::SyncExpert(const ModelProfile& profile, Rng& rng)
    : profile_(profile),
      audio_(1, profile.sync_channels, profile.sync_dim, rng),
      video_(3 * kSyncFrames, profile.sync_channels, profile.sync_dim, rng) {
  register_module("audio", audio_);
  register_module("video", video_);
}

nn::Tensor SyncExpert::embed_audio(const nn::Tensor& mel) const {
  require(mel.rank() == 4 && mel.dim(1) == 1 && mel.dim(2) == kMelSteps && mel.dim(3) == kMelBins,
          ErrorCode::kShapeMismatch,
          "sync audio input " + nn::shape_str(mel.shape()) + " is not [N, 1, 16, 80]");
  return audio_.forward(mel);
}

nn::Tensor SyncExpert::embed_video(const nn::Tensor& window) const {
  const int64_t s = profile_.face_size;
  require(window.rank() == 4 && window.dim(1) == 3 * kSyncFrames && window.dim(2) == s / 2 &&
              window.dim(3) == s,
          ErrorCode::kShapeMismatch,
          "sync video input " + nn::shape_str(window.shape()) + " is not [N, 15, " +
              std::to_string(s / 2) + ", " + std::to_string(s) + "]");
  return video_.forward(window);
}

nn::Tensor sync_distance(const nn::Tensor& audio, const nn::Tensor& video) {
  return nn::rowwise_dot(nn::l2_normalize(audio), nn::l2_normalize(video));
}

double sync_distance(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kShapeMismatch,
          "embeddings differ in length");
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

LseScores lse_from_embeddings(const nn::Tensor& audio, const nn::Tensor& video) {
  require(audio.rank() == 2 && audio.shape() == video.shape() && audio.dim(0) > 0,
          ErrorCode::kShapeMismatch, "LSE needs matching [K, D] embeddings");
  const int64_t k = audio.dim(0), d = audio.dim(1);
  const auto a = audio.data(), v = video.data();
  std::vector<std::pair<int, double>> per_offset;
  for (int o = -kLseMaxOffset; o <= kLseMaxOffset; ++o) {
    double total = 0.0;
    int64_t count = 0;
    for (int64_t w = std::max<int64_t>(0, -o); w < k && w + o < k; ++w) {
      double sq = 0.0;
      for (int64_t c = 0; c < d; ++c) {
        const double diff = v[w * d + c] - a[(w + o) * d + c];
        sq += diff * diff;
      }
      total += std::sqrt(sq);
      ++count;
    }
    if (count > 0) per_offset.emplace_back(o, total / static_cast<double>(count));
  }
  LseScores out;
  const auto best = std::min_element(per_offset.begin(), per_offset.end(),
                                     [](const auto& x, const auto& y) { return x.second < y.second; });
  out.distance = best->second;
  out.offset = best->first;
  std::vector<double> means;
  for (const auto& [o, m] : per_offset) means.push_back(m);
  std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
  out.confidence = means[means.size() / 2] - out.distance;
  return out;
}

LseScores lse_scores(const SyncExpert& expert, std::span<const Image> faces,
                     const media::MelSpectrogram& mel, int first_frame) {
  require(first_frame >= 0, ErrorCode::kIndexOutOfRange, "negative first frame");
  const int n = std::min(static_cast<int>(faces.size()), mel.frame_count() - first_frame);
  require(n >= kSyncFrames, ErrorCode::kNotEnoughFrames,
          "LSE needs at least 5 frames, got " + std::to_string(n));
  const int windows = n - kSyncFrames + 1;
  nn::NoGradGuard no_grad;
  std::vector<media::MelChunk> chunks;
  std::vector<Image> frames;
  for (int w = 0; w < windows; ++w) chunks.push_back(media::mel_window_for_frame(mel, first_frame + w));
  for (int w = 0; w < windows; ++w)
    for (int f = 0; f < kSyncFrames; ++f) frames.push_back(faces[w + f]);
  const nn::Tensor audio = expert.embed_audio(mel_batch(chunks));
  const nn::Tensor video = expert.embed_video(sync_window(stack_images(frames)));
  return lse_from_embeddings(audio, video);
}

}  // namespace hyperlips::model
