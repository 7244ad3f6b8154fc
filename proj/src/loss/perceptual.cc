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

#include "hyperlips/loss/perceptual.h"

#include "hyperlips/error.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::loss {
namespace {

constexpr uint64_t kExtractorSeed = 0x5EEDF00DULL;
constexpr double kSlope = 0.2;

struct StageSpec {
  int64_t in;
  int64_t out;
  int stride;
};

constexpr StageSpec kStages[] = {{3, 8, 1}, {8, 16, 2}, {16, 16, 2}, {16, 32, 2}, {32, 32, 2}};

}  // namespace

RandomFixedExtractor::RandomFixedExtractor() {
  Rng rng(kExtractorSeed);
  for (const auto& s : kStages) {
    stages_.push_back(std::make_unique<nn::Conv2d>(s.in, s.out, 3, s.stride, 1, rng, kSlope));
    register_module("stage" + std::to_string(stages_.size() - 1), *stages_.back());
  }
  set_trainable(false);
}

std::vector<nn::Tensor> RandomFixedExtractor::features(const nn::Tensor& images) const {
  require(images.rank() == 4 && images.dim(1) == 3, ErrorCode::kShapeMismatch,
          "extractor expects [N, 3, H, W], got " + nn::shape_str(images.shape()));
  std::vector<nn::Tensor> out;
  nn::Tensor h = nn::add_scalar(images * 2.0, -1.0);
  for (const auto& stage : stages_) {
    h = nn::leaky_relu(stage->forward(h), kSlope);
    out.push_back(h);
  }
  return out;
}

std::unique_ptr<PerceptualExtractor> make_extractor(std::string_view id) {
  if (id == kRandomFixedExtractorId) return std::make_unique<RandomFixedExtractor>();
  fail(ErrorCode::kExtractorUnavailable, "no perceptual extractor bound to '" + std::string(id) + "'");
}

}  // namespace hyperlips::loss
