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

#ifndef HYPERLIPS_LOSS_LOSSES_H_
#define HYPERLIPS_LOSS_LOSSES_H_

#include <span>
#include <vector>

#include "hyperlips/face/face_ops.h"
#include "hyperlips/loss/perceptual.h"
#include "hyperlips/nn/tensor.h"

namespace hyperlips::loss {

// Probabilities and cosine scores are clamped this far from 0 (and 1)
// before any logarithm.
inline constexpr double kLogClamp = 1e-7;

struct BaseLossWeights {
  double adversarial = 0.2;
  double reconstruction = 0.5;
  double lpips = 0.5;
  double sync = 0.3;
};

struct HrLossWeights {
  double adversarial = 1.0;
  double perceptual = 1.0;
  double reconstruction = 1.0;
  double lip = 1.0;
};

struct LossWeights {
  BaseLossWeights base;
  HrLossWeights hr;
};

// Throws InvalidArgument if any weight is negative or not finite.
void validate(const LossWeights& weights);

// mean log(1 - d_real) + mean log(d_fake); minimised by d_real -> 1 and
// d_fake -> 0.
nn::Tensor disc_loss(const nn::Tensor& d_real, const nn::Tensor& d_fake);
// mean log(1 - d_fake); minimised by d_fake -> 1.
nn::Tensor adv_loss(const nn::Tensor& d_fake);

nn::Tensor recon_l1(const nn::Tensor& x, const nn::Tensor& y);

// Unit-normalised channel features, squared differences summed over
// channels (uniform weights unless `layer_weights` is given), spatial
// mean, summed over layers, batch mean.
nn::Tensor lpips_loss(const nn::Tensor& x, const nn::Tensor& y,
                      const PerceptualExtractor& extractor,
                      std::span<const double> layer_weights = {});

// Mean absolute feature difference per layer, summed over layers.
nn::Tensor perceptual_l1(const nn::Tensor& x, const nn::Tensor& y,
                         const PerceptualExtractor& extractor);

// Batch mean of -log(clamp(cos(audio, video), 1e-7, 1)) for row-aligned
// unit embeddings.
nn::Tensor sync_loss(const nn::Tensor& audio_embeddings, const nn::Tensor& video_embeddings);

// LPIPS on each sample's lip box plus the mean absolute difference inside
// the lip mask over the whole batch. One region per sample.
nn::Tensor lip_loss(const nn::Tensor& hr, const nn::Tensor& gt,
                    std::span<const face::LipRegion> regions,
                    const PerceptualExtractor& extractor);

struct BaseLossTerms {
  nn::Tensor adversarial;
  nn::Tensor reconstruction;
  nn::Tensor lpips;
  nn::Tensor sync;
};

struct HrLossTerms {
  nn::Tensor adversarial;
  nn::Tensor perceptual;
  nn::Tensor reconstruction;
  nn::Tensor lip;
};

nn::Tensor total_base(const BaseLossTerms& terms, const BaseLossWeights& weights = {});
nn::Tensor total_hr(const HrLossTerms& terms, const HrLossWeights& weights = {});

}  // namespace hyperlips::loss

#endif  // HYPERLIPS_LOSS_LOSSES_H_
