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

#ifndef HYPERLIPS_MODEL_HR_DECODER_H_
#define HYPERLIPS_MODEL_HR_DECODER_H_

#include <memory>
#include <vector>

#include "hyperlips/nn/layers.h"
#include "hyperlips/nn/module.h"

namespace hyperlips::model {

// Maps base face (RGB) concatenated with its landmark sketch to a face
// upscaled by 1, 2 or 4.
class HrDecoder : public nn::Module {
 public:
  HrDecoder(int scale, int64_t width, Rng& rng);

  int scale() const { return scale_; }
  int transpose_stages() const { return static_cast<int>(up_.size()); }

  // base: [N, 3, S, S], sketch: [N, 1, S, S] -> [N, 3, S*scale, S*scale].
  nn::Tensor forward(const nn::Tensor& base, const nn::Tensor& sketch) const;

 private:
  int scale_;
  std::unique_ptr<nn::ConvAct> stem_;
  std::vector<std::unique_ptr<nn::ResidualBlock>> blocks_;
  std::vector<std::unique_ptr<nn::ConvTranspose2d>> up_;
  std::unique_ptr<nn::ConvAct> head_;
  std::unique_ptr<nn::Conv2d> out_;
};

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_HR_DECODER_H_
