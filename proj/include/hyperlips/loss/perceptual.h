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

#ifndef HYPERLIPS_LOSS_PERCEPTUAL_H_
#define HYPERLIPS_LOSS_PERCEPTUAL_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hyperlips/nn/layers.h"
#include "hyperlips/nn/module.h"

namespace hyperlips::loss {

// Frozen feature-map extractor behind the perceptual losses.
class PerceptualExtractor {
 public:
  virtual ~PerceptualExtractor() = default;
  virtual std::string id() const = 0;
  // One [N, C_l, H_l, W_l] map per configured layer for an [N, 3, H, W]
  // image batch in [0, 1].
  virtual std::vector<nn::Tensor> features(const nn::Tensor& images) const = 0;
};

inline constexpr std::string_view kRandomFixedExtractorId = "random-fixed-v1";

// Five conv stages with weights drawn once from a pinned seed and never
// trained, so perceptual losses are deterministic and need no downloads.
class RandomFixedExtractor : public PerceptualExtractor, public nn::Module {
 public:
  RandomFixedExtractor();
  std::string id() const override { return std::string(kRandomFixedExtractorId); }
  std::vector<nn::Tensor> features(const nn::Tensor& images) const override;

 private:
  std::vector<std::unique_ptr<nn::Conv2d>> stages_;
};

// Throws ExtractorUnavailable for ids other than the built-in binding.
std::unique_ptr<PerceptualExtractor> make_extractor(std::string_view id);

}  // namespace hyperlips::loss

#endif  // HYPERLIPS_LOSS_PERCEPTUAL_H_
