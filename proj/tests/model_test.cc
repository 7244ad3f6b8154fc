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

#include <algorithm>
#include <cmath>

#include "grad_check.h"
#include "hyperlips/error.h"
#include "hyperlips/model/base_generator.h"
#include "hyperlips/model/discriminator.h"
#include "hyperlips/model/hr_decoder.h"
#include "hyperlips/model/inputs.h"
#include "hyperlips/model/sync_expert.h"
#include "hyperlips/nn/ops.h"
#include "test_util.h"

namespace hyperlips::model {
namespace {

using hyperlips::testing::expect_error;
using hyperlips::testing::random_tensor;

nn::Tensor faces(int64_t n, int64_t s, Rng& rng) { return random_tensor({n, 3, s, s}, rng, 0, 1); }
nn::Tensor mels(int64_t n, Rng& rng) { return random_tensor({n, 1, 16, 80}, rng, 0, 1); }

double max_abs_diff(const nn::Tensor& a, const nn::Tensor& b) {
  double m = 0;
  for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

class ToyGenerator : public ::testing::Test {
 protected:
  Rng rng_{17};
  ModelProfile profile_ = toy_profile();
  BaseGenerator gen_{profile_, rng_};
};

TEST(Profiles, KnownNames) {
  EXPECT_EQ(profile_by_name("full").face_size, 128);
  EXPECT_EQ(profile_by_name("toy").face_size, 32);
  expect_error(ErrorCode::kInvalidArgument, [] { profile_by_name("huge"); });
}

TEST(FullProfile, ShapeLaws) {
  Rng rng(1);
  const ModelProfile p = full_profile();
  BaseGenerator gen(p, rng);
  nn::NoGradGuard no_grad;
  const Pyramid latent = gen.encode_face(faces(1, 128, rng), faces(1, 128, rng));
  ASSERT_EQ(latent.size(), 4u);
  const int64_t sizes[] = {64, 32, 16, 8}, channels[] = {32, 64, 128, 256};
  for (int i = 0; i < 4; ++i)
    EXPECT_EQ(latent[i].shape(), (nn::Shape{1, channels[i], sizes[i], sizes[i]}));
  const AudioFeatures audio = gen.encode_audio(mels(1, rng));
  EXPECT_EQ(audio.pooled.shape(), (nn::Shape{1, 512}));
  const HyperWeights w = gen.hyper_weights(audio);
  const int64_t kernels[] = {1024, 4096, 16384, 65536};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(w.kernels[i].shape(), (nn::Shape{1, kernels[i]}));
    EXPECT_EQ(w.biases[i].shape(), (nn::Shape{1, channels[i]}));
  }
  const Pyramid modulated = apply_hyperconv(latent, w);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(modulated[i].shape(), latent[i].shape());
  expect_error(ErrorCode::kShapeMismatch,
               [&] { gen.encode_face(faces(1, 128, rng), faces(1, 64, rng)); });
}

TEST_F(ToyGenerator, ShapeLaws) {
  nn::NoGradGuard no_grad;
  const Pyramid latent = gen_.encode_face(faces(2, 32, rng_), faces(2, 32, rng_));
  const int64_t sizes[] = {16, 8, 4, 2};
  for (int i = 0; i < 4; ++i)
    EXPECT_EQ(latent[i].shape(), (nn::Shape{2, profile_.channels[i], sizes[i], sizes[i]}));
  const HyperWeights w = gen_.hyper_weights(gen_.encode_audio(mels(2, rng_)));
  const int64_t kernels[] = {64, 256, 1024, 4096};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(w.kernels[i].dim(1), kernels[i]);
  const nn::Tensor out = gen_.decode(apply_hyperconv(latent, w));
  EXPECT_EQ(out.shape(), (nn::Shape{2, 3, 32, 32}));
  for (double v : out.data()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST_F(ToyGenerator, AudioEncoderIsNotConstant) {
  nn::NoGradGuard no_grad;
  const nn::Tensor zero({1, 1, 16, 80}, 0.0), one({1, 1, 16, 80}, 1.0);
  EXPECT_GT(max_abs_diff(gen_.encode_audio(zero).pooled, gen_.encode_audio(one).pooled), 0.0);
  const media::MelChunk narrow{16, 64, std::vector<double>(16 * 64, 0.0)};
  expect_error(ErrorCode::kShapeMismatch, [&] { mel_batch(std::span(&narrow, 1)); });
  expect_error(ErrorCode::kShapeMismatch, [&] { gen_.encode_audio(nn::Tensor({1, 1, 16, 64})); });
}

TEST_F(ToyGenerator, HyperWeightsDependOnlyOnAudio) {
  nn::NoGradGuard no_grad;
  const nn::Tensor m = mels(1, rng_);
  const HyperWeights a = gen_.hyper_weights(gen_.encode_audio(m));
  const HyperWeights b = gen_.hyper_weights(gen_.encode_audio(m.clone()));
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(max_abs_diff(a.kernels[i], b.kernels[i]), 0.0);
    EXPECT_EQ(max_abs_diff(a.biases[i], b.biases[i]), 0.0);
  }
}

TEST(HyperConv, IdentityKernelIsPassThrough) {
  Rng rng(3);
  const std::array<int64_t, 4> ch{2, 3, 4, 5};
  Pyramid latent;
  for (int i = 0; i < 4; ++i) latent.push_back(random_tensor({2, ch[i], 8 >> i, 8 >> i}, rng));
  for (int k : {1, 3}) {
    const Pyramid out = apply_hyperconv(latent, identity_hyper_weights(ch, k, 2), 1.0);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(max_abs_diff(out[i], latent[i]), 0.0);
  }
}

TEST(HyperConv, ZeroKernelGivesBias) {
  Rng rng(4);
  const std::array<int64_t, 4> ch{2, 2, 2, 2};
  Pyramid latent;
  for (int i = 0; i < 4; ++i) latent.push_back(random_tensor({1, 2, 4, 4}, rng));
  HyperWeights w = identity_hyper_weights(ch, 1, 1);
  for (int i = 0; i < 4; ++i) {
    for (double& v : w.kernels[i].data()) v = 0.0;
    w.biases[i].data()[0] = 0.25;
    w.biases[i].data()[1] = -0.5;
  }
  const Pyramid out = apply_hyperconv(latent, w, 1.0);
  for (int i = 0; i < 4; ++i)
    for (int64_t p = 0; p < 16; ++p) {
      EXPECT_EQ(out[i].data()[p], 0.25);
      EXPECT_EQ(out[i].data()[16 + p], -0.5);
    }
}

TEST(HyperConv, MatchesHandRolledConvolution) {
  Rng rng(5);
  const int c = 2, h = 3, w = 3;
  for (int k : {1, 3}) {
    Pyramid latent;
    HyperWeights weights;
    weights.kernel_size = k;
    for (int i = 0; i < 4; ++i) {
      latent.push_back(random_tensor({1, c, h, w}, rng));
      weights.kernels.push_back(random_tensor({1, c * c * k * k}, rng));
      weights.biases.push_back(random_tensor({1, c}, rng));
    }
    const Pyramid out = apply_hyperconv(latent, weights, 1.0);
    for (int i = 0; i < 4; ++i) {
      const auto x = latent[i].data();
      const auto kw = weights.kernels[i].data();
      for (int o = 0; o < c; ++o)
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx < w; ++xx) {
            double acc = weights.biases[i].data()[o];
            for (int ci = 0; ci < c; ++ci)
              for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) {
                  const int sy = y + dy - k / 2, sx = xx + dx - k / 2;
                  if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
                  acc += kw[((o * c + ci) * k + dy) * k + dx] * x[(ci * h + sy) * w + sx];
                }
            EXPECT_NEAR(out[i].data()[(o * h + y) * w + xx], acc, 1e-6);
          }
    }
  }
  HyperWeights bad = identity_hyper_weights({2, 2, 2, 2}, 1, 1);
  bad.kernels[2] = nn::Tensor({1, 5});
  Pyramid latent;
  for (int i = 0; i < 4; ++i) latent.push_back(nn::Tensor({1, 2, 2, 2}));
  expect_error(ErrorCode::kWeightShapeMismatch, [&] { apply_hyperconv(latent, bad); });
}

TEST_F(ToyGenerator, DecoderIsNotConstantAndNeedsFourLevels) {
  nn::NoGradGuard no_grad;
  const Pyramid a = gen_.encode_face(faces(1, 32, rng_), faces(1, 32, rng_));
  const Pyramid b = gen_.encode_face(faces(1, 32, rng_), faces(1, 32, rng_));
  EXPECT_GT(max_abs_diff(gen_.decode(a), gen_.decode(b)), 0.0);
  expect_error(ErrorCode::kShapeMismatch, [&] { gen_.decode(Pyramid(a.begin(), a.begin() + 3)); });
}

TEST_F(ToyGenerator, DeterministicAndAudioSensitive) {
  nn::NoGradGuard no_grad;
  const nn::Tensor ref = faces(1, 32, rng_), masked = faces(1, 32, rng_);
  const nn::Tensor m1 = mels(1, rng_), m2 = mels(1, rng_);
  const nn::Tensor a = gen_.forward(ref, masked, m1);
  EXPECT_EQ(max_abs_diff(a, gen_.forward(ref, masked, m1)), 0.0);
  EXPECT_GT(max_abs_diff(a, gen_.forward(ref, masked, m2)), 0.0);
}

TEST_F(ToyGenerator, IdentityModulationEqualsEncodeDecode) {
  nn::NoGradGuard no_grad;
  const nn::Tensor ref = faces(2, 32, rng_), masked = faces(2, 32, rng_);
  const nn::Tensor via_identity = gen_.decode(apply_hyperconv(
      gen_.encode_face(ref, masked), identity_hyper_weights(profile_.channels, 1, 2), 1.0));
  EXPECT_EQ(max_abs_diff(via_identity, gen_.forward_without_audio(ref, masked)), 0.0);
}

TEST_F(ToyGenerator, HyperNetGradientMatchesFiniteDifferences) {
  const nn::Tensor ref = faces(1, 32, rng_), masked = faces(1, 32, rng_), m = mels(1, rng_);
  std::vector<nn::Tensor> hyper;
  for (const auto& p : gen_.named_parameters())
    if (p.name.rfind("hypernet.", 0) == 0) hyper.push_back(p.tensor);
  ASSERT_FALSE(hyper.empty());
  // A signed random projection keeps the loss near zero so the central
  // difference is not swamped by cancellation in a large sum.
  const nn::Tensor w = hyperlips::testing::random_tensor({1, 3, 32, 32}, rng_);
  const auto samples = hyperlips::testing::check_gradients(
      [&] { return nn::sum(gen_.forward(ref, masked, m) * w); }, hyper, 12, 99, 1e-4);
  for (const auto& s : samples)
    EXPECT_TRUE(hyperlips::testing::grad_close(s, 1e-3, 1e-7))
        << s.analytic << " vs " << s.numeric;
}

TEST_F(ToyGenerator, GradientReachesEverySubNetwork) {
  gen_.zero_grad();
  nn::sum(gen_.forward(faces(2, 32, rng_), faces(2, 32, rng_), mels(2, rng_))).backward();
  for (const char* prefix : {"face_encoder.", "audio_encoder.", "audio_pool.", "hypernet.",
                             "decoder."}) {
    double norm = 0;
    for (const auto& p : gen_.named_parameters())
      if (p.name.rfind(prefix, 0) == 0 && p.tensor.has_grad())
        for (double g : p.tensor.grad()) norm += g * g;
    EXPECT_GT(norm, 0.0) << prefix;
  }
}

TEST(GeneratorParams, CountIsFunctionOfProfile) {
  Rng a(1), b(2);
  EXPECT_EQ(BaseGenerator(toy_profile(), a).parameter_count(),
            BaseGenerator(toy_profile(), b).parameter_count());
}

TEST(Discriminator, RangeBatchAndShape) {
  Rng rng(6);
  for (bool lower : {true, false}) {
    QualityDiscriminator d(32, toy_profile().disc_channels, lower, rng);
    nn::NoGradGuard no_grad;
    const nn::Tensor batch = faces(3, 32, rng);
    const nn::Tensor scores = d.forward(batch);
    ASSERT_EQ(scores.shape(), (nn::Shape{3}));
    for (int64_t i = 0; i < 3; ++i) {
      EXPECT_GT(scores.data()[i], 0.0);
      EXPECT_LT(scores.data()[i], 1.0);
      const nn::Tensor single = d.forward(nn::slice(batch, 0, i, i + 1));
      EXPECT_NEAR(single.item(), scores.data()[i], 1e-12);
    }
    expect_error(ErrorCode::kShapeMismatch, [&] { d.forward(faces(1, 64, rng)); });
  }
}

TEST(SyncExpert, EmbeddingsAreUnitNormAndDeterministic) {
  Rng rng(7);
  SyncExpert expert(toy_profile(), rng);
  nn::NoGradGuard no_grad;
  const nn::Tensor m = mels(4, rng);
  const nn::Tensor a = expert.embed_audio(m);
  const nn::Tensor v = expert.embed_video(sync_window(faces(20, 32, rng)));
  for (const nn::Tensor* e : {&a, &v}) {
    ASSERT_EQ(e->shape(), (nn::Shape{4, 64}));
    for (int64_t i = 0; i < 4; ++i) {
      double norm = 0;
      for (int64_t j = 0; j < 64; ++j) norm += e->data()[i * 64 + j] * e->data()[i * 64 + j];
      EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-5);
    }
  }
  EXPECT_EQ(max_abs_diff(a, expert.embed_audio(m)), 0.0);
  expect_error(ErrorCode::kShapeMismatch, [&] { expert.embed_audio(nn::Tensor({1, 1, 16, 64})); });
  std::vector<Image> four(4, Image(3, 32, 32, 0.5));
  expect_error(ErrorCode::kShapeMismatch, [&] { sync_window(four); });
  expect_error(ErrorCode::kShapeMismatch,
               [&] { expert.embed_video(nn::Tensor({1, 12, 16, 32})); });
  std::vector<Image> five(5, Image(3, 32, 32, 0.5));
  EXPECT_EQ(sync_window(five).shape(), (nn::Shape{1, 15, 16, 32}));
}

TEST(SyncDistance, KnownValuesAndSymmetry) {
  EXPECT_DOUBLE_EQ(sync_distance(std::vector<double>{0.6, 0.8}, {0.6, 0.8}), 1.0);
  EXPECT_DOUBLE_EQ(sync_distance(std::vector<double>{1, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(sync_distance(std::vector<double>{0.6, -0.8}, {-0.6, 0.8}), -1.0);
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(6), b(6);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const double d = sync_distance(a, b);
    EXPECT_EQ(d, sync_distance(b, a));
    EXPECT_LE(std::abs(d), 1.0);
  }
  const nn::Tensor x({2, 2}, {0.6, 0.8, 1, 0}), y({2, 2}, {0.6, 0.8, 0, 1});
  const nn::Tensor d = sync_distance(x, y);
  EXPECT_NEAR(d.data()[0], 1.0, 1e-12);
  EXPECT_NEAR(d.data()[1], 0.0, 1e-12);
}

TEST(HrDecoder, OutputSizeLaw) {
  Rng rng(9);
  for (int scale : {1, 2, 4}) {
    HrDecoder dec(scale, 4, rng);
    EXPECT_EQ(1 << dec.transpose_stages(), scale);
    nn::NoGradGuard no_grad;
    for (int64_t s : {16, 32}) {
      const nn::Tensor out = dec.forward(faces(1, s, rng), random_tensor({1, 1, s, s}, rng, 0, 1));
      EXPECT_EQ(out.shape(), (nn::Shape{1, 3, s * scale, s * scale}));
      for (double v : out.data()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
    }
  }
  expect_error(ErrorCode::kInvalidArgument, [&] { HrDecoder(3, 4, rng); });
}

TEST(HrDecoder, FullProfileSizes) {
  Rng rng(10);
  nn::NoGradGuard no_grad;
  HrDecoder x2(2, 8, rng), x1(1, 8, rng);
  const nn::Tensor base = faces(1, 128, rng), sketch({1, 1, 128, 128});
  EXPECT_EQ(x2.forward(base, sketch).shape(), (nn::Shape{1, 3, 256, 256}));
  EXPECT_EQ(x1.forward(base, sketch).shape(), (nn::Shape{1, 3, 128, 128}));
  expect_error(ErrorCode::kShapeMismatch, [&] { x2.forward(base, nn::Tensor({1, 1, 64, 64})); });
}

TEST(HrDiscriminator, RangeAndShape) {
  Rng rng(11);
  QualityDiscriminator d(64, toy_profile().disc_channels, false, rng);
  nn::NoGradGuard no_grad;
  const nn::Tensor s = d.forward(faces(2, 64, rng));
  for (double v : s.data()) EXPECT_TRUE(v > 0.0 && v < 1.0);
  expect_error(ErrorCode::kShapeMismatch, [&] { d.forward(faces(2, 32, rng)); });
}

nn::Tensor rows(int64_t k, int64_t d, Rng& rng) { return random_tensor({k, d}, rng, 0.0, 1.0); }

TEST(Lse, IdenticalEmbeddingsGiveZeroDistance) {
  Rng rng(21);
  const nn::Tensor e = rows(40, 6, rng);
  const LseScores s = lse_from_embeddings(e, e);
  EXPECT_EQ(s.distance, 0.0);
  EXPECT_EQ(s.offset, 0);
  EXPECT_GT(s.confidence, 0.1);
}

TEST(Lse, FindsShiftAndMatchesBruteForce) {
  Rng rng(22);
  const int64_t k = 30, d = 4;
  const nn::Tensor video = rows(k, d, rng);
  for (int shift : {-7, 3, 12}) {
    // audio_{w + shift} == video_w wherever both exist.
    nn::Tensor audio = rows(k, d, rng);
    for (int64_t w = 0; w < k; ++w)
      if (w + shift >= 0 && w + shift < k)
        for (int64_t c = 0; c < d; ++c) audio.data()[(w + shift) * d + c] = video.data()[w * d + c];
    const LseScores s = lse_from_embeddings(audio, video);
    EXPECT_EQ(s.offset, shift);
    EXPECT_NEAR(s.distance, 0.0, 1e-12);

    std::vector<double> means;
    for (int o = -15; o <= 15; ++o) {
      double total = 0;
      int count = 0;
      for (int64_t w = 0; w < k; ++w) {
        if (w + o < 0 || w + o >= k) continue;
        double sq = 0;
        for (int64_t c = 0; c < d; ++c) {
          const double diff = video.data()[w * d + c] - audio.data()[(w + o) * d + c];
          sq += diff * diff;
        }
        total += std::sqrt(sq);
        ++count;
      }
      means.push_back(total / count);
    }
    std::sort(means.begin(), means.end());
    EXPECT_NEAR(s.confidence, means[15] - means[0], 1e-12);
  }
}

TEST(Lse, ScoresNeedFiveFrames) {
  Rng rng(23);
  const ModelProfile p = toy_profile();
  SyncExpert expert(p, rng);
  media::MelSpectrogram mel(80, 64, 16000 * 20 / 25, std::vector<double>(80 * 64, 0.1));
  std::vector<Image> few(4, Image(3, p.face_size, p.face_size, 0.5));
  expect_error(ErrorCode::kNotEnoughFrames, [&] { lse_scores(expert, few, mel); });
  std::vector<Image> faces;
  for (int i = 0; i < 12; ++i) faces.push_back(Image(3, p.face_size, p.face_size, 0.04 * i));
  const LseScores a = lse_scores(expert, faces, mel);
  const LseScores b = lse_scores(expert, faces, mel);
  EXPECT_EQ(a.distance, b.distance);
  EXPECT_GE(a.confidence, 0.0);
}

}  // namespace
}  // namespace hyperlips::model
