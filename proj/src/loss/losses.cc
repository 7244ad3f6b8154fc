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

#include "hyperlips/loss/losses.h"

#include <cmath>
#include <string>

#include "hyperlips/error.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::loss {
namespace {

void require_same_shape(const nn::Tensor& x, const nn::Tensor& y, const char* what) {
  require(x.shape() == y.shape(), ErrorCode::kShapeMismatch,
          std::string(what) + ": " + nn::shape_str(x.shape()) + " vs " +
              nn::shape_str(y.shape()));
}

nn::Tensor log_clamped(const nn::Tensor& p) {
  return nn::log(nn::clamp(p, kLogClamp, 1.0 - kLogClamp));
}

nn::Tensor one_minus(const nn::Tensor& p) { return nn::add_scalar(p * -1.0, 1.0); }

void check_weight(double w, const char* name) {
  require(std::isfinite(w) && w >= 0.0, ErrorCode::kInvalidArgument,
          std::string("loss weight ") + name + " must be finite and >= 0");
}

}  // namespace

void validate(const LossWeights& w) {
  check_weight(w.base.adversarial, "base.adversarial");
  check_weight(w.base.reconstruction, "base.reconstruction");
  check_weight(w.base.lpips, "base.lpips");
  check_weight(w.base.sync, "base.sync");
  check_weight(w.hr.adversarial, "hr.adversarial");
  check_weight(w.hr.perceptual, "hr.perceptual");
  check_weight(w.hr.reconstruction, "hr.reconstruction");
  check_weight(w.hr.lip, "hr.lip");
}

nn::Tensor disc_loss(const nn::Tensor& d_real, const nn::Tensor& d_fake) {
  return nn::mean(log_clamped(one_minus(d_real))) + nn::mean(log_clamped(d_fake));
}

nn::Tensor adv_loss(const nn::Tensor& d_fake) {
  return nn::mean(log_clamped(one_minus(d_fake)));
}

nn::Tensor recon_l1(const nn::Tensor& x, const nn::Tensor& y) {
  require_same_shape(x, y, "recon_l1");
  return nn::mean(nn::abs(x - y));
}

nn::Tensor lpips_loss(const nn::Tensor& x, const nn::Tensor& y,
                      const PerceptualExtractor& extractor,
                      std::span<const double> layer_weights) {
  require_same_shape(x, y, "lpips_loss");
  const auto fx = extractor.features(x);
  const auto fy = extractor.features(y);
  require(layer_weights.empty() || layer_weights.size() == fx.size(),
          ErrorCode::kInvalidArgument, "one LPIPS weight per extractor layer required");
  nn::Tensor total = nn::Tensor::scalar(0.0);
  for (size_t l = 0; l < fx.size(); ++l) {
    const nn::Tensor diff = nn::channel_normalize(fx[l]) - nn::channel_normalize(fy[l]);
    // Summing over channels then averaging over batch and space equals the
    // element mean scaled by the channel count.
    const double scale = static_cast<double>(fx[l].dim(1)) *
                         (layer_weights.empty() ? 1.0 : layer_weights[l]);
    total = total + nn::mean(nn::square(diff)) * scale;
  }
  return total;
}

nn::Tensor perceptual_l1(const nn::Tensor& x, const nn::Tensor& y,
                         const PerceptualExtractor& extractor) {
  require_same_shape(x, y, "perceptual_l1");
  const auto fx = extractor.features(x);
  const auto fy = extractor.features(y);
  nn::Tensor total = nn::Tensor::scalar(0.0);
  for (size_t l = 0; l < fx.size(); ++l) total = total + nn::mean(nn::abs(fx[l] - fy[l]));
  return total;
}

nn::Tensor sync_loss(const nn::Tensor& audio_embeddings, const nn::Tensor& video_embeddings) {
  require_same_shape(audio_embeddings, video_embeddings, "sync_loss");
  const nn::Tensor cosine = nn::rowwise_dot(audio_embeddings, video_embeddings);
  return nn::mean(nn::log(nn::clamp(cosine, kLogClamp, 1.0))) * -1.0;
}

nn::Tensor lip_loss(const nn::Tensor& hr, const nn::Tensor& gt,
                    std::span<const face::LipRegion> regions,
                    const PerceptualExtractor& extractor) {
  require_same_shape(hr, gt, "lip_loss");
  require(hr.rank() == 4 && static_cast<int64_t>(regions.size()) == hr.dim(0),
          ErrorCode::kShapeMismatch, "lip_loss needs one lip region per sample");
  const int64_t n = hr.dim(0), c = hr.dim(1), h = hr.dim(2), w = hr.dim(3);
  nn::Tensor mask({n, c, h, w});
  nn::Tensor lpips_sum = nn::Tensor::scalar(0.0);
  for (int64_t i = 0; i < n; ++i) {
    const face::LipRegion& r = regions[i];
    require(r.width() > 0 && r.height() > 0, ErrorCode::kEmptyLipRegion,
            "lip region of sample " + std::to_string(i) + " is empty");
    require(r.x0 >= 0 && r.y0 >= 0 && r.x1 <= w && r.y1 <= h && r.mask.height == h &&
                r.mask.width == w,
            ErrorCode::kShapeMismatch, "lip region does not fit the image");
    const auto crop = [&](const nn::Tensor& t) {
      nn::Tensor s = nn::slice(t, 0, i, i + 1);
      s = nn::slice(s, 2, r.y0, r.y1);
      return nn::slice(s, 3, r.x0, r.x1);
    };
    lpips_sum = lpips_sum + lpips_loss(crop(hr), crop(gt), extractor);
    auto m = mask.data().subspan(static_cast<size_t>(i * c * h * w), c * h * w);
    for (int64_t ch = 0; ch < c; ++ch)
      std::copy(r.mask.data.begin(), r.mask.data.end(), m.begin() + ch * h * w);
  }
  const nn::Tensor masked = nn::mean(nn::abs((hr - gt) * mask));
  return lpips_sum * (1.0 / static_cast<double>(n)) + masked;
}

nn::Tensor total_base(const BaseLossTerms& t, const BaseLossWeights& w) {
  return t.adversarial * w.adversarial + t.reconstruction * w.reconstruction +
         t.lpips * w.lpips + t.sync * w.sync;
}

nn::Tensor total_hr(const HrLossTerms& t, const HrLossWeights& w) {
  return t.adversarial * w.adversarial + t.perceptual * w.perceptual +
         t.reconstruction * w.reconstruction + t.lip * w.lip;
}

}  // namespace hyperlips::loss
