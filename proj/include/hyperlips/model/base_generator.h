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

#ifndef HYPERLIPS_MODEL_BASE_GENERATOR_H_
#define HYPERLIPS_MODEL_BASE_GENERATOR_H_

#include <memory>
#include <vector>

#include "hyperlips/model/profile.h"
#include "hyperlips/nn/layers.h"
#include "hyperlips/nn/module.h"

namespace hyperlips::model {

// Four feature maps at strictly halving resolutions.
using Pyramid = std::vector<nn::Tensor>;

// stem conv followed by four {stride-2 conv, residual block} levels.
class PyramidEncoder : public nn::Module {
 public:
  PyramidEncoder(int64_t in_channels, const std::array<int64_t, kPyramidLevels>& channels,
                 Rng& rng);
  Pyramid forward(const nn::Tensor& x) const;

 private:
  std::unique_ptr<nn::ConvAct> stem_;
  std::vector<std::unique_ptr<nn::ConvAct>> down_;
  std::vector<std::unique_ptr<nn::ResidualBlock>> blocks_;
};

struct AudioFeatures {
  Pyramid levels;
  nn::Tensor pooled;  // [N, audio_dim]
};

// Per-level generated kernels [N, c*c*k*k] and biases [N, c].
struct HyperWeights {
  std::vector<nn::Tensor> kernels;
  std::vector<nn::Tensor> biases;
  int kernel_size = 1;
};

class HyperNet : public nn::Module {
 public:
  HyperNet(int64_t audio_dim, const std::array<int64_t, kPyramidLevels>& channels, int kernel_size,
           Rng& rng);
  HyperWeights forward(const nn::Tensor& pooled) const;

 private:
  std::unique_ptr<nn::Linear> trunk_;
  std::vector<std::unique_ptr<nn::Linear>> kernel_heads_;
  std::vector<std::unique_ptr<nn::Linear>> bias_heads_;
  int kernel_size_;
};

class FaceDecoder : public nn::Module {
 public:
  FaceDecoder(const std::array<int64_t, kPyramidLevels>& channels, Rng& rng);
  nn::Tensor forward(const Pyramid& levels) const;

 private:
  std::array<int64_t, kPyramidLevels> channels_;
  std::unique_ptr<nn::ResidualBlock> bottleneck_;
  std::vector<std::unique_ptr<nn::ConvTranspose2d>> up_;
  std::vector<std::unique_ptr<nn::ConvAct>> fuse_;
  std::unique_ptr<nn::ConvAct> refine_;
  std::unique_ptr<nn::Conv2d> out_;
};

// Flattened per-level identity kernels with zero biases for a batch of n.
HyperWeights identity_hyper_weights(const std::array<int64_t, kPyramidLevels>& channels,
                                    int kernel_size, int64_t n);

// Per-level sample convolution with the generated weights followed by
// leaky-ReLU(slope); slope 1 makes it linear.
Pyramid apply_hyperconv(const Pyramid& latent, const HyperWeights& weights, double slope = 0.01);

class BaseGenerator : public nn::Module {
 public:
  BaseGenerator(const ModelProfile& profile, Rng& rng);

  const ModelProfile& profile() const { return profile_; }

  // ref and masked: [N, 3, S, S].
  Pyramid encode_face(const nn::Tensor& ref, const nn::Tensor& masked) const;
  // mel: [N, 1, 16, 80].
  AudioFeatures encode_audio(const nn::Tensor& mel) const;
  HyperWeights hyper_weights(const AudioFeatures& audio) const;
  nn::Tensor decode(const Pyramid& modulated) const;

  // Full composition, [N, 3, S, S] in (0, 1).
  nn::Tensor forward(const nn::Tensor& ref, const nn::Tensor& masked, const nn::Tensor& mel) const;
  // Same composition with identity modulation in place of the hypernetwork.
  nn::Tensor forward_without_audio(const nn::Tensor& ref, const nn::Tensor& masked) const;

 private:
  ModelProfile profile_;
  PyramidEncoder face_encoder_;
  PyramidEncoder audio_encoder_;
  nn::Linear audio_pool_;
  HyperNet hypernet_;
  FaceDecoder decoder_;
};

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_BASE_GENERATOR_H_
