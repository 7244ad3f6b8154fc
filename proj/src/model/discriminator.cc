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

#include "hyperlips/model/discriminator.h"

#include "hyperlips/error.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::model {
namespace {

constexpr double kSlope = 0.2;

}  // namespace

QualityDiscriminator::QualityDiscriminator(int face_size, const std::array<int64_t, 4>& channels,
                                           bool lower_half_only, Rng& rng)
    : face_size_(face_size), lower_half_only_(lower_half_only) {
  stem_ = std::make_unique<nn::Conv2d>(3, channels[0], 3, 1, 1, rng, kSlope);
  register_module("stem", *stem_);
  int64_t prev = channels[0];
  for (int i = 0; i < 4; ++i) {
    const int64_t out = channels[std::min(i + 1, 3)];
    down_.push_back(std::make_unique<nn::Conv2d>(prev, out, 3, 2, 1, rng, kSlope));
    register_module("down" + std::to_string(i), *down_.back());
    prev = out;
  }
  head_ = std::make_unique<nn::Linear>(prev, 1, rng, 1.0);
  register_module("head", *head_);
}

nn::Tensor QualityDiscriminator::forward(const nn::Tensor& faces) const {
  require(faces.rank() == 4 && faces.dim(1) == 3 && faces.dim(2) == face_size_ &&
              faces.dim(3) == face_size_,
          ErrorCode::kShapeMismatch,
          "discriminator expects [N, 3, " + std::to_string(face_size_) + ", " +
              std::to_string(face_size_) + "], got " + nn::shape_str(faces.shape()));
  nn::Tensor h = lower_half_only_ ? nn::slice(faces, 2, face_size_ / 2, face_size_) : faces;
  h = nn::leaky_relu(stem_->forward(h), kSlope);
  for (const auto& d : down_) h = nn::leaky_relu(d->forward(h), kSlope);
  const nn::Tensor logits = head_->forward(nn::global_avg_pool(h));
  return nn::reshape(nn::sigmoid(logits), {faces.dim(0)});
}

}  // namespace hyperlips::model
