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

#include <gtest/gtest.h>

#include <cmath>

#include "grad_check.h"
#include "hyperlips/error.h"
#include "hyperlips/loss/losses.h"
#include "hyperlips/model/base_generator.h"
#include "hyperlips/model/discriminator.h"
#include "hyperlips/model/inputs.h"
#include "hyperlips/model/sync_expert.h"
#include "hyperlips/nn/ops.h"
#include "test_util.h"

namespace hyperlips::loss {
namespace {

using hyperlips::testing::expect_error;
using hyperlips::testing::random_tensor;

// Two layers: the image itself and its 2x2 average pool.
class StubExtractor : public PerceptualExtractor {
 public:
  std::string id() const override { return "stub"; }
  std::vector<nn::Tensor> features(const nn::Tensor& x) const override {
    return {x, nn::avg_pool2(x)};
  }
};

nn::Tensor probs(std::vector<double> v) {
  const auto n = static_cast<int64_t>(v.size());
  return nn::Tensor({n}, std::move(v));
}

// Plain-loop 2x2 average pool on a flat [N, C, H, W] buffer.
std::vector<double> pool_oracle(const std::vector<double>& x, int n, int c, int h, int w) {
  std::vector<double> out(static_cast<size_t>(n) * c * (h / 2) * (w / 2));
  for (int i = 0; i < n * c; ++i)
    for (int y = 0; y < h / 2; ++y)
      for (int xx = 0; xx < w / 2; ++xx) {
        const double* p = &x[static_cast<size_t>(i) * h * w];
        out[(static_cast<size_t>(i) * (h / 2) + y) * (w / 2) + xx] =
            (p[2 * y * w + 2 * xx] + p[2 * y * w + 2 * xx + 1] + p[(2 * y + 1) * w + 2 * xx] +
             p[(2 * y + 1) * w + 2 * xx + 1]) /
            4.0;
      }
  return out;
}

double lpips_layer_oracle(const std::vector<double>& a, const std::vector<double>& b, int n,
                          int c, int h, int w) {
  double total = 0;
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < h * w; ++p) {
      double na = 0, nb = 0;
      for (int ch = 0; ch < c; ++ch) {
        na += std::pow(a[(static_cast<size_t>(i) * c + ch) * h * w + p], 2);
        nb += std::pow(b[(static_cast<size_t>(i) * c + ch) * h * w + p], 2);
      }
      na = std::sqrt(na) + 1e-10;
      nb = std::sqrt(nb) + 1e-10;
      for (int ch = 0; ch < c; ++ch) {
        const size_t k = (static_cast<size_t>(i) * c + ch) * h * w + p;
        total += std::pow(a[k] / na - b[k] / nb, 2);
      }
    }
  return total / (static_cast<double>(n) * h * w);
}

std::vector<double> to_vec(const nn::Tensor& t) { return {t.data().begin(), t.data().end()}; }

TEST(AdversarialLoss, KnownValues) {
  EXPECT_NEAR(disc_loss(probs({0.5}), probs({0.5})).item(), 2 * std::log(0.5), 1e-12);
  EXPECT_NEAR(disc_loss(probs({0.5}), probs({0.5})).item(), -1.3862943611, 1e-9);
  EXPECT_NEAR(disc_loss(probs({1.0 - 1e-9}), probs({1e-9})).item(), 2 * std::log(kLogClamp), 1e-6);
  EXPECT_NEAR(adv_loss(probs({0.5})).item(), std::log(0.5), 1e-12);
  EXPECT_NEAR(adv_loss(probs({1.0})).item(), std::log(kLogClamp), 1e-6);
  EXPECT_NEAR(adv_loss(probs({0.2, 0.4, 0.9})).item(),
              (std::log(0.8) + std::log(0.6) + std::log(0.1)) / 3, 1e-12);
}

TEST(AdversarialLoss, GradientSigns) {
  nn::Tensor real = probs({0.5}), fake = probs({0.5});
  real.set_requires_grad(true);
  fake.set_requires_grad(true);
  disc_loss(real, fake).backward();
  EXPECT_LT(real.grad()[0], 0.0);
  EXPECT_GT(fake.grad()[0], 0.0);
  nn::Tensor g = probs({0.5});
  g.set_requires_grad(true);
  adv_loss(g).backward();
  EXPECT_LT(g.grad()[0], 0.0);
}

TEST(ReconstructionLoss, Oracles) {
  Rng rng(1);
  const nn::Tensor x = random_tensor({2, 3, 4, 5}, rng, 0, 1);
  const nn::Tensor y = random_tensor({2, 3, 4, 5}, rng, 0, 1);
  EXPECT_EQ(recon_l1(x, x).item(), 0.0);
  EXPECT_EQ(recon_l1(nn::Tensor({1, 3, 2, 2}, 0.0), nn::Tensor({1, 3, 2, 2}, 1.0)).item(), 1.0);
  double brute = 0;
  for (int64_t i = 0; i < x.numel(); ++i) brute += std::abs(x.data()[i] - y.data()[i]);
  EXPECT_NEAR(recon_l1(x, y).item(), brute / x.numel(), 1e-7);
  expect_error(ErrorCode::kShapeMismatch, [&] { recon_l1(x, nn::Tensor({2, 3, 4, 4})); });
}

TEST(Lpips, StubExtractorOracle) {
  Rng rng(2);
  const StubExtractor stub;
  const nn::Tensor x = random_tensor({2, 3, 4, 6}, rng, 0, 1);
  const nn::Tensor y = random_tensor({2, 3, 4, 6}, rng, 0, 1);
  const auto xv = to_vec(x), yv = to_vec(y);
  const double expected = lpips_layer_oracle(xv, yv, 2, 3, 4, 6) +
                          lpips_layer_oracle(pool_oracle(xv, 2, 3, 4, 6),
                                             pool_oracle(yv, 2, 3, 4, 6), 2, 3, 2, 3);
  EXPECT_NEAR(lpips_loss(x, y, stub).item(), expected, 1e-9);
  const double weights[] = {0.0, 2.0};
  EXPECT_NEAR(lpips_loss(x, y, stub, weights).item(),
              2.0 * lpips_layer_oracle(pool_oracle(xv, 2, 3, 4, 6), pool_oracle(yv, 2, 3, 4, 6),
                                       2, 3, 2, 3),
              1e-9);
}

TEST(Lpips, IdentityNonNegativityAndSymmetry) {
  Rng rng(3);
  const RandomFixedExtractor extractor;
  for (int trial = 0; trial < 5; ++trial) {
    const nn::Tensor x = random_tensor({2, 3, 16, 16}, rng, 0, 1);
    const nn::Tensor y = random_tensor({2, 3, 16, 16}, rng, 0, 1);
    EXPECT_EQ(lpips_loss(x, x, extractor).item(), 0.0);
    const double xy = lpips_loss(x, y, extractor).item();
    EXPECT_GE(xy, 0.0);
    EXPECT_NEAR(xy, lpips_loss(y, x, extractor).item(), 1e-6);
  }
}

TEST(PerceptualL1, StubExtractorOracle) {
  Rng rng(4);
  const StubExtractor stub;
  const nn::Tensor x = random_tensor({1, 3, 4, 4}, rng, 0, 1);
  const nn::Tensor y = random_tensor({1, 3, 4, 4}, rng, 0, 1);
  const auto xv = to_vec(x), yv = to_vec(y);
  const auto xp = pool_oracle(xv, 1, 3, 4, 4), yp = pool_oracle(yv, 1, 3, 4, 4);
  double l0 = 0, l1 = 0;
  for (size_t i = 0; i < xv.size(); ++i) l0 += std::abs(xv[i] - yv[i]);
  for (size_t i = 0; i < xp.size(); ++i) l1 += std::abs(xp[i] - yp[i]);
  EXPECT_NEAR(perceptual_l1(x, y, stub).item(), l0 / xv.size() + l1 / xp.size(), 1e-12);
  EXPECT_EQ(perceptual_l1(x, x, stub).item(), 0.0);
  EXPECT_GE(perceptual_l1(x, y, RandomFixedExtractor()).item(), 0.0);
}

TEST(Extractor, FrozenDeterministicAndDifferentiable) {
  expect_error(ErrorCode::kExtractorUnavailable, [] { make_extractor("vgg16-imagenet"); });
  const auto a = make_extractor(kRandomFixedExtractorId);
  const RandomFixedExtractor b;
  Rng rng(5);
  nn::Tensor x = random_tensor({1, 3, 32, 32}, rng, 0, 1);
  const auto fa = a->features(x), fb = b.features(x);
  ASSERT_EQ(fa.size(), 5u);
  for (size_t l = 0; l < fa.size(); ++l) EXPECT_EQ(to_vec(fa[l]), to_vec(fb[l]));
  for (const auto& p : b.parameters()) EXPECT_FALSE(p.requires_grad());
  x.set_requires_grad(true);
  perceptual_l1(x, nn::Tensor({1, 3, 32, 32}, 0.5), b).backward();
  double norm = 0;
  for (double g : x.grad()) norm += g * g;
  EXPECT_GT(norm, 0.0);
}

TEST(SyncLoss, Identities) {
  const nn::Tensor a({2, 3}, std::vector<double>{1, 0, 0, 0, 0.6, 0.8});
  EXPECT_NEAR(sync_loss(a, a).item(), 0.0, 1e-12);
  const nn::Tensor b({2, 3}, std::vector<double>{0, 1, 0, 1, 0, 0});
  EXPECT_NEAR(sync_loss(a, b).item(), -std::log(1e-7), 1e-9);
  EXPECT_NEAR(sync_loss(a, b).item(), 16.118095651, 1e-6);
  EXPECT_NEAR(sync_loss(a, nn::Tensor({2, 3}, std::vector<double>{-1, 0, 0, 0, -0.6, -0.8})).item(),
              16.118095651, 1e-6);
}

TEST(SyncLoss, GradientReachesFrames) {
  Rng rng(6);
  const model::ModelProfile p = model::toy_profile();
  model::SyncExpert expert(p, rng);
  expert.set_trainable(false);
  nn::Tensor frames = random_tensor({5, 3, 32, 32}, rng, 0, 1);
  frames.set_requires_grad(true);
  const nn::Tensor audio = expert.embed_audio(random_tensor({1, 1, 16, 80}, rng, 0, 1));
  sync_loss(audio, expert.embed_video(model::sync_window(frames))).backward();
  double norm = 0;
  for (double g : frames.grad()) norm += g * g;
  EXPECT_GT(norm, 0.0);
  for (const auto& prm : expert.parameters()) EXPECT_FALSE(prm.has_grad() && prm.requires_grad());
}

face::LipRegion box_region(int size, int x0, int y0, int x1, int y1, double fill) {
  face::LipRegion r;
  r.x0 = x0, r.y0 = y0, r.x1 = x1, r.y1 = y1;
  r.mask = Image(1, size, size, 0.0);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) r.mask.at(0, y, x) = fill;
  return r;
}

TEST(LipLoss, Identities) {
  Rng rng(7);
  const StubExtractor stub;
  const nn::Tensor hr = random_tensor({2, 3, 8, 8}, rng, 0, 1);
  const nn::Tensor gt = random_tensor({2, 3, 8, 8}, rng, 0, 1);
  const std::vector<face::LipRegion> regions = {box_region(8, 2, 4, 6, 8, 1.0),
                                                box_region(8, 0, 0, 4, 2, 1.0)};
  EXPECT_EQ(lip_loss(hr, hr, regions, stub).item(), 0.0);

  // A zero mask leaves only the cropped LPIPS term.
  std::vector<face::LipRegion> unmasked = regions;
  for (auto& r : unmasked) std::fill(r.mask.data.begin(), r.mask.data.end(), 0.0);
  double lpips = 0;
  for (int i = 0; i < 2; ++i) {
    const auto& r = regions[i];
    const auto crop = [&](const nn::Tensor& t) {
      return nn::slice(nn::slice(nn::slice(t, 0, i, i + 1), 2, r.y0, r.y1), 3, r.x0, r.x1);
    };
    lpips += lpips_loss(crop(hr), crop(gt), stub).item() / 2;
  }
  EXPECT_NEAR(lip_loss(hr, gt, unmasked, stub).item(), lpips, 1e-12);

  double masked = 0;
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const size_t k = ((static_cast<size_t>(i) * 3 + c) * 8 + y) * 8 + x;
          masked += std::abs(hr.data()[k] - gt.data()[k]) * regions[i].mask.at(0, y, x);
        }
  EXPECT_NEAR(lip_loss(hr, gt, regions, stub).item(), lpips + masked / hr.numel(), 1e-12);

  std::vector<face::LipRegion> empty = regions;
  empty[1].x1 = empty[1].x0;
  expect_error(ErrorCode::kEmptyLipRegion, [&] { lip_loss(hr, gt, empty, stub); });
  expect_error(ErrorCode::kShapeMismatch,
               [&] { lip_loss(hr, gt, std::span(regions).first(1), stub); });
}

TEST(TotalLoss, WeightedSums) {
  const auto one = nn::Tensor::scalar(1.0), zero = nn::Tensor::scalar(0.0);
  EXPECT_NEAR(total_base({one, one, one, one}).item(), 1.5, 1e-12);
  EXPECT_EQ(total_base({zero, zero, zero, zero}).item(), 0.0);
  EXPECT_NEAR(total_base({one, one, one, one}, {1.0, 0.0, 0.0, 2.0}).item(), 3.0, 1e-12);
  EXPECT_NEAR(total_hr({one, one, one, one}).item(), 4.0, 1e-12);
  EXPECT_EQ(total_hr({zero, zero, zero, zero}).item(), 0.0);
  EXPECT_NEAR(total_hr({one, one, one, one}, {0.5, 0.0, 2.0, 0.0}).item(), 2.5, 1e-12);
  LossWeights w;
  validate(w);
  w.hr.lip = -1.0;
  expect_error(ErrorCode::kInvalidArgument, [&] { validate(w); });
}

TEST(AllLosses, FiniteOnSaturatedInputs) {
  const RandomFixedExtractor extractor;
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0}) {
      const nn::Tensor x({1, 3, 16, 16}, a), y({1, 3, 16, 16}, b);
      const nn::Tensor p({2}, a), q({2}, b);
      const std::vector<face::LipRegion> region = {box_region(16, 4, 8, 12, 14, 1.0)};
      for (double v : {disc_loss(p, q).item(), adv_loss(p).item(), recon_l1(x, y).item(),
                       lpips_loss(x, y, extractor).item(), perceptual_l1(x, y, extractor).item(),
                       lip_loss(x, y, region, extractor).item(),
                       sync_loss(nn::Tensor({1, 4}, a), nn::Tensor({1, 4}, b)).item()})
        EXPECT_TRUE(std::isfinite(v)) << a << " " << b;
    }
}

TEST(TotalBase, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  const model::ModelProfile p = model::toy_profile();
  model::BaseGenerator gen(p, rng);
  model::QualityDiscriminator disc(p.face_size, p.disc_channels, true, rng);
  model::SyncExpert expert(p, rng);
  disc.set_trainable(false);
  expert.set_trainable(false);
  const RandomFixedExtractor extractor;
  const nn::Tensor gt = random_tensor({5, 3, 32, 32}, rng, 0, 1);
  const nn::Tensor ref = random_tensor({5, 3, 32, 32}, rng, 0, 1);
  const nn::Tensor masked = model::lower_half_masked(gt);
  const nn::Tensor chunks = random_tensor({5, 1, 16, 80}, rng, 0, 1);
  const nn::Tensor window_audio = random_tensor({1, 1, 16, 80}, rng, 0, 1);
  const auto loss = [&] {
    const nn::Tensor fake = gen.forward(ref, masked, chunks);
    BaseLossTerms t;
    t.adversarial = adv_loss(disc.forward(fake));
    t.reconstruction = recon_l1(fake, gt);
    t.lpips = lpips_loss(fake, gt, extractor);
    t.sync = sync_loss(expert.embed_audio(window_audio),
                       expert.embed_video(model::sync_window(fake)));
    return total_base(t);
  };
  const auto samples =
      hyperlips::testing::check_gradients(loss, gen.parameters(), 10, 21, 1e-5);
  for (const auto& s : samples)
    EXPECT_TRUE(hyperlips::testing::grad_close(s, 1e-3, 1e-8)) << s.analytic << " vs " << s.numeric;
}

}  // namespace
}  // namespace hyperlips::loss
