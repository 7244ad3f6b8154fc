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

#include "hyperlips/model/base_generator.h"

#include <numeric>

#include "hyperlips/error.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::model {
namespace {

constexpr double kSlope = 0.01;
// Initial scale of the generated-weight heads relative to He init.
constexpr double kHeadScale = 0.01;

void scale_parameters(nn::Module& m, double factor) {
  for (auto& p : m.parameters())
    for (double& v : p.data()) v *= factor;
}

}  // namespace

PyramidEncoder::PyramidEncoder(int64_t in_channels,
                               const std::array<int64_t, kPyramidLevels>& channels, Rng& rng) {
  stem_ = std::make_unique<nn::ConvAct>(in_channels, channels[0], 3, 1, 1, kSlope, rng);
  register_module("stem", *stem_);
  int64_t prev = channels[0];
  for (int i = 0; i < kPyramidLevels; ++i) {
    down_.push_back(std::make_unique<nn::ConvAct>(prev, channels[i], 3, 2, 1, kSlope, rng));
    blocks_.push_back(std::make_unique<nn::ResidualBlock>(channels[i], kSlope, rng));
    register_module("down" + std::to_string(i), *down_.back());
    register_module("block" + std::to_string(i), *blocks_.back());
    prev = channels[i];
  }
}

Pyramid PyramidEncoder::forward(const nn::Tensor& x) const {
  Pyramid levels;
  nn::Tensor h = stem_->forward(x);
  for (int i = 0; i < kPyramidLevels; ++i) {
    h = blocks_[i]->forward(down_[i]->forward(h));
    levels.push_back(h);
  }
  return levels;
}

HyperNet::HyperNet(int64_t audio_dim, const std::array<int64_t, kPyramidLevels>& channels,
                   int kernel_size, Rng& rng)
    : kernel_size_(kernel_size) {
  require(kernel_size >= 1 && kernel_size % 2 == 1, ErrorCode::kInvalidArgument,
          "hyper kernel size must be odd");
  trunk_ = std::make_unique<nn::Linear>(audio_dim, audio_dim, rng, kSlope);
  register_module("trunk", *trunk_);
  const HyperWeights identity = identity_hyper_weights(channels, kernel_size, 1);
  for (int i = 0; i < kPyramidLevels; ++i) {
    const int64_t c = channels[i];
    kernel_heads_.push_back(
        std::make_unique<nn::Linear>(audio_dim, c * c * kernel_size * kernel_size, rng, 1.0));
    bias_heads_.push_back(std::make_unique<nn::Linear>(audio_dim, c, rng, 1.0));
    scale_parameters(*kernel_heads_.back(), kHeadScale);
    scale_parameters(*bias_heads_.back(), kHeadScale);
    auto bias = kernel_heads_.back()->bias().data();
    std::copy(identity.kernels[i].data().begin(), identity.kernels[i].data().end(), bias.begin());
    register_module("kernel_head" + std::to_string(i), *kernel_heads_.back());
    register_module("bias_head" + std::to_string(i), *bias_heads_.back());
  }
}

HyperWeights HyperNet::forward(const nn::Tensor& pooled) const {
  const nn::Tensor h = nn::leaky_relu(trunk_->forward(pooled), kSlope);
  HyperWeights out;
  out.kernel_size = kernel_size_;
  for (int i = 0; i < kPyramidLevels; ++i) {
    out.kernels.push_back(kernel_heads_[i]->forward(h));
    out.biases.push_back(bias_heads_[i]->forward(h));
  }
  return out;
}

HyperWeights identity_hyper_weights(const std::array<int64_t, kPyramidLevels>& channels,
                                    int kernel_size, int64_t n) {
  HyperWeights w;
  w.kernel_size = kernel_size;
  const int64_t kk = static_cast<int64_t>(kernel_size) * kernel_size;
  const int64_t centre = kk / 2;
  for (int64_t c : channels) {
    nn::Tensor kernel({n, c * c * kk});
    auto data = kernel.data();
    for (int64_t s = 0; s < n; ++s)
      for (int64_t o = 0; o < c; ++o) data[s * c * c * kk + (o * c + o) * kk + centre] = 1.0;
    w.kernels.push_back(kernel);
    w.biases.push_back(nn::Tensor({n, c}));
  }
  return w;
}

Pyramid apply_hyperconv(const Pyramid& latent, const HyperWeights& weights, double slope) {
  require(latent.size() == static_cast<size_t>(kPyramidLevels) &&
              weights.kernels.size() == latent.size() && weights.biases.size() == latent.size(),
          ErrorCode::kWeightShapeMismatch, "hyper weights do not cover four levels");
  Pyramid out;
  for (size_t i = 0; i < latent.size(); ++i) {
    const nn::Tensor y =
        nn::sample_conv2d(latent[i], weights.kernels[i], weights.biases[i], weights.kernel_size);
    require(y.shape() == latent[i].shape(), ErrorCode::kWeightShapeMismatch,
            "hyper kernel changes the channel count of level " + std::to_string(i));
    out.push_back(slope == 1.0 ? y : nn::leaky_relu(y, slope));
  }
  return out;
}

FaceDecoder::FaceDecoder(const std::array<int64_t, kPyramidLevels>& channels, Rng& rng)
    : channels_(channels) {
  bottleneck_ = std::make_unique<nn::ResidualBlock>(channels[3], kSlope, rng);
  register_module("bottleneck", *bottleneck_);
  for (int i = kPyramidLevels - 1; i >= 0; --i) {
    const int64_t out = i > 0 ? channels[i - 1] : channels[0];
    up_.push_back(std::make_unique<nn::ConvTranspose2d>(channels[i], out, 4, 2, 1, rng, kSlope));
    register_module("up" + std::to_string(kPyramidLevels - 1 - i), *up_.back());
    if (i > 0) {
      fuse_.push_back(std::make_unique<nn::ConvAct>(2 * out, out, 3, 1, 1, kSlope, rng));
      register_module("fuse" + std::to_string(kPyramidLevels - 1 - i), *fuse_.back());
    }
  }
  refine_ = std::make_unique<nn::ConvAct>(channels[0], channels[0], 3, 1, 1, kSlope, rng);
  out_ = std::make_unique<nn::Conv2d>(channels[0], 3, 3, 1, 1, rng, 1.0);
  register_module("refine", *refine_);
  register_module("out", *out_);
}

nn::Tensor FaceDecoder::forward(const Pyramid& levels) const {
  require(levels.size() == static_cast<size_t>(kPyramidLevels), ErrorCode::kShapeMismatch,
          "decoder needs 4 pyramid levels, got " + std::to_string(levels.size()));
  for (int i = 0; i < kPyramidLevels; ++i) {
    require(levels[i].rank() == 4 && levels[i].dim(1) == channels_[i] &&
                (i == 0 || (levels[i].dim(2) * 2 == levels[i - 1].dim(2) &&
                            levels[i].dim(3) * 2 == levels[i - 1].dim(3))),
            ErrorCode::kShapeMismatch,
            "pyramid level " + std::to_string(i) + " has shape " + nn::shape_str(levels[i].shape()));
  }
  nn::Tensor h = bottleneck_->forward(levels[3]);
  for (int step = 0; step < kPyramidLevels; ++step) {
    h = nn::leaky_relu(up_[step]->forward(h), kSlope);
    const int skip = kPyramidLevels - 2 - step;
    if (skip >= 0) h = fuse_[step]->forward(nn::concat({h, levels[skip]}, 1));
  }
  return nn::sigmoid(out_->forward(refine_->forward(h)));
}

BaseGenerator::BaseGenerator(const ModelProfile& profile, Rng& rng)
    : profile_(profile),
      face_encoder_(6, profile.channels, rng),
      audio_encoder_(1, profile.channels, rng),
      audio_pool_(std::accumulate(profile.channels.begin(), profile.channels.end(), int64_t{0}),
                  profile.audio_dim, rng, 1.0),
      hypernet_(profile.audio_dim, profile.channels, profile.hyper_kernel, rng),
      decoder_(profile.channels, rng) {
  require(profile.face_size % 16 == 0 && profile.face_size >= 16, ErrorCode::kInvalidArgument,
          "face size must be a multiple of 16");
  register_module("face_encoder", face_encoder_);
  register_module("audio_encoder", audio_encoder_);
  register_module("audio_pool", audio_pool_);
  register_module("hypernet", hypernet_);
  register_module("decoder", decoder_);
}

Pyramid BaseGenerator::encode_face(const nn::Tensor& ref, const nn::Tensor& masked) const {
  const int64_t s = profile_.face_size;
  for (const nn::Tensor* t : {&ref, &masked})
    require(t->rank() == 4 && t->dim(1) == 3 && t->dim(2) == s && t->dim(3) == s,
            ErrorCode::kShapeMismatch,
            "face input " + nn::shape_str(t->shape()) + " does not match profile size " +
                std::to_string(s));
  require(ref.dim(0) == masked.dim(0), ErrorCode::kShapeMismatch, "batch sizes differ");
  return face_encoder_.forward(nn::concat({ref, masked}, 1));
}

AudioFeatures BaseGenerator::encode_audio(const nn::Tensor& mel) const {
  require(mel.rank() == 4 && mel.dim(1) == 1 && mel.dim(2) == kMelSteps && mel.dim(3) == kMelBins,
          ErrorCode::kShapeMismatch,
          "audio input " + nn::shape_str(mel.shape()) + " is not [N, 1, 16, 80]");
  AudioFeatures out;
  out.levels = audio_encoder_.forward(mel);
  std::vector<nn::Tensor> pooled;
  for (const auto& level : out.levels) pooled.push_back(nn::global_avg_pool(level));
  out.pooled = audio_pool_.forward(nn::concat(pooled, 1));
  return out;
}

HyperWeights BaseGenerator::hyper_weights(const AudioFeatures& audio) const {
  return hypernet_.forward(audio.pooled);
}

nn::Tensor BaseGenerator::decode(const Pyramid& modulated) const {
  return decoder_.forward(modulated);
}

nn::Tensor BaseGenerator::forward(const nn::Tensor& ref, const nn::Tensor& masked,
                                  const nn::Tensor& mel) const {
  const Pyramid latent = encode_face(ref, masked);
  require(mel.rank() == 4 && mel.dim(0) == ref.dim(0), ErrorCode::kShapeMismatch,
          "audio batch does not match face batch");
  return decode(apply_hyperconv(latent, hyper_weights(encode_audio(mel))));
}

nn::Tensor BaseGenerator::forward_without_audio(const nn::Tensor& ref,
                                                const nn::Tensor& masked) const {
  return decode(encode_face(ref, masked));
}

}  // namespace hyperlips::model
