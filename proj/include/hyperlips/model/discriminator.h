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

#ifndef HYPERLIPS_MODEL_DISCRIMINATOR_H_
#define HYPERLIPS_MODEL_DISCRIMINATOR_H_

#include <memory>
#include <vector>

#include "hyperlips/nn/layers.h"
#include "hyperlips/nn/module.h"

namespace hyperlips::model {

// Conv stack with leaky-ReLU(0.2), global pooling and a sigmoid head. The
// scores are per item, so batching never changes a result.
class QualityDiscriminator : public nn::Module {
 public:
  // With lower_half_only the network judges rows [S/2, S) of each face.
  QualityDiscriminator(int face_size, const std::array<int64_t, 4>& channels, bool lower_half_only,
                       Rng& rng);

  int face_size() const { return face_size_; }

  // faces: [N, 3, S, S] -> probabilities [N].
  nn::Tensor forward(const nn::Tensor& faces) const;

 private:
  int face_size_;
  bool lower_half_only_;
  std::unique_ptr<nn::Conv2d> stem_;
  std::vector<std::unique_ptr<nn::Conv2d>> down_;
  std::unique_ptr<nn::Linear> head_;
};

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_DISCRIMINATOR_H_
