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

#include "hyperlips/model/inputs.h"

#include <algorithm>

#include "hyperlips/error.h"
#include "hyperlips/model/profile.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::model {

nn::Tensor mel_batch(std::span<const media::MelChunk> chunks) {
  require(!chunks.empty(), ErrorCode::kShapeMismatch, "no mel chunks");
  std::vector<double> values;
  values.reserve(chunks.size() * kMelSteps * kMelBins);
  for (const auto& c : chunks) {
    require(c.steps == kMelSteps && c.bins == kMelBins &&
                c.values.size() == static_cast<size_t>(kMelSteps * kMelBins),
            ErrorCode::kShapeMismatch,
            "mel chunk is " + std::to_string(c.steps) + "x" + std::to_string(c.bins) +
                ", expected 16x80");
    values.insert(values.end(), c.values.begin(), c.values.end());
  }
  return nn::Tensor({static_cast<int64_t>(chunks.size()), 1, kMelSteps, kMelBins},
                    std::move(values));
}

nn::Tensor lower_half(const nn::Tensor& faces) {
  require(faces.rank() == 4, ErrorCode::kShapeMismatch, "faces must be [N, C, H, W]");
  const int64_t h = faces.dim(2);
  return nn::slice(faces, 2, h / 2, h);
}

nn::Tensor lower_half_masked(const nn::Tensor& faces) {
  require(faces.rank() == 4, ErrorCode::kShapeMismatch, "faces must be [N, C, H, W]");
  nn::Tensor out = faces.detach().clone();
  const int64_t h = faces.dim(2), w = faces.dim(3), planes = faces.dim(0) * faces.dim(1);
  auto d = out.data();
  for (int64_t p = 0; p < planes; ++p)
    std::fill(d.begin() + p * h * w + (h / 2) * w, d.begin() + (p + 1) * h * w, 0.0);
  return out;
}

nn::Tensor sync_window(const nn::Tensor& frames) {
  require(frames.rank() == 4 && frames.dim(1) == 3 && frames.dim(0) % kSyncFrames == 0 &&
              frames.dim(0) > 0,
          ErrorCode::kShapeMismatch,
          "sync window needs groups of 5 RGB frames, got " + nn::shape_str(frames.shape()));
  const nn::Tensor lower = lower_half(frames);
  return nn::reshape(lower, {frames.dim(0) / kSyncFrames, 3 * kSyncFrames, lower.dim(2),
                             lower.dim(3)});
}

nn::Tensor sync_window(std::span<const Image> frames) {
  require(frames.size() == static_cast<size_t>(kSyncFrames), ErrorCode::kShapeMismatch,
          "sync window needs exactly 5 frames, got " + std::to_string(frames.size()));
  return sync_window(stack_images(frames));
}

}  // namespace hyperlips::model
