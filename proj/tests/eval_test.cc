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

#include "hyperlips/error.h"
#include "hyperlips/eval/metrics.h"
#include "hyperlips/face/toy_face.h"
#include "hyperlips/rng.h"
#include "metric_oracles.h"
#include "test_util.h"

namespace hyperlips::eval {
namespace {

using hyperlips::testing::brute_ssim;
using hyperlips::testing::expect_error;

// Same integer generator as the script that produced the frozen reference
// values below.
std::vector<double> lcg(uint32_t seed, size_t n) {
  std::vector<double> out;
  uint32_t x = seed;
  for (size_t i = 0; i < n; ++i) {
    x = 1664525u * x + 1013904223u;
    out.push_back(static_cast<double>(x >> 8) / 16777216.0);
  }
  return out;
}

std::pair<Image, Image> lcg_pair(uint32_t seed, int c, int h, int w) {
  const size_t n = static_cast<size_t>(c) * h * w;
  const auto v = lcg(seed, 2 * n);
  Image a(c, h, w), b(c, h, w);
  for (size_t i = 0; i < n; ++i) {
    a.data[i] = v[i];
    b.data[i] = 0.6 * v[i] + 0.4 * v[n + i];
  }
  return {a, b};
}

Image random_image(Rng& rng, int c, int h, int w) {
  Image img(c, h, w);
  for (double& v : img.data) v = rng.uniform(0.0, 1.0);
  return img;
}

TEST(Psnr, ClosedForms) {
  Rng rng(1);
  const Image x = random_image(rng, 3, 8, 8);
  EXPECT_EQ(psnr(x, x), kPsnrCap);
  Image shifted(3, 8, 8, 0.5), base(3, 8, 8, 0.5 + 1.0 / 255);
  EXPECT_NEAR(psnr(shifted, base), 20 * std::log10(255.0), 1e-9);
  EXPECT_NEAR(psnr(shifted, base), 48.13, 0.01);
  EXPECT_NEAR(psnr(Image(3, 4, 4, 0.0), Image(3, 4, 4, 1.0)), 0.0, 1e-12);
  expect_error(ErrorCode::kShapeMismatch, [&] { psnr(x, Image(3, 8, 7)); });
}

TEST(Psnr, SymmetricAndDecreasingWithNoise) {
  Rng rng(2);
  const Image x = random_image(rng, 3, 16, 16);
  double last = kPsnrCap + 1;
  for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    Rng noise(7);
    Image y = x;
    for (double& v : y.data) v += amp * noise.uniform(-1.0, 1.0);
    EXPECT_EQ(psnr(x, y), psnr(y, x));
    EXPECT_LT(psnr(x, y), last);
    last = psnr(x, y);
  }
}

TEST(Ssim, IdentityRangeAndSymmetry) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Image x = random_image(rng, 3, 16, 16), y = random_image(rng, 3, 16, 16);
    EXPECT_NEAR(ssim(x, x), 1.0, 1e-12);
    const double s = ssim(x, y);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(s, ssim(y, x), 1e-9);
  }
  expect_error(ErrorCode::kShapeMismatch, [] { ssim(Image(1, 10, 10), Image(1, 10, 10)); });
}

TEST(Ssim, MatchesBruteForceWindows) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const Image x = random_image(rng, 3, 14 + t, 12 + t);
    Image y = x;
    for (double& v : y.data) v = std::clamp(v + rng.uniform(-0.3, 0.3), 0.0, 1.0);
    EXPECT_NEAR(ssim(x, y), brute_ssim(x, y), 1e-12);
  }
}

TEST(Ssim, MatchesFrozenReferenceValues) {
  // scikit-image structural_similarity, gaussian_weights, sigma 1.5,
  // use_sample_covariance off, data_range 1, channel_axis 0.
  const struct {
    uint32_t seed;
    int c, h, w;
    double expected;
  } cases[] = {{1, 3, 24, 24, 0.7843600226306761},
               {2, 3, 16, 20, 0.7535288243977843},
               {3, 1, 11, 11, 0.7950980045602498}};
  for (const auto& k : cases) {
    const auto [a, b] = lcg_pair(k.seed, k.c, k.h, k.w);
    EXPECT_NEAR(ssim(a, b), k.expected, 1e-10) << k.seed;
  }
}

// Returns the ground-truth toy landmarks translated by the offset stored in
// pixel (0, 0) of the first two channels.
class InjectedLandmarks : public face::LandmarkDetector {
 public:
  face::LandmarkSet detect(const Image& img) const override {
    if (img.at(2, 0, 0) < 0) fail(ErrorCode::kLandmarkFailure, "marked undetectable");
    face::LandmarkSet lm = face::toy_landmarks(10, 10, 140, 0.4, 160);
    for (auto& p : lm.points) {
      p.x += img.at(0, 0, 0);
      p.y += img.at(1, 0, 0);
    }
    return lm;
  }
};

Image marked(double dx, double dy, bool detectable = true) {
  Image img(3, 4, 4);
  img.at(0, 0, 0) = dx;
  img.at(1, 0, 0) = dy;
  img.at(2, 0, 0) = detectable ? 0.0 : -1.0;
  return img;
}

TEST(Lmd, IdentityAndTranslationLaw) {
  const InjectedLandmarks det;
  const std::vector<Image> gt = {marked(0, 0), marked(1, 2)};
  EXPECT_EQ(lmd(gt, gt, det).distance, 0.0);
  const std::vector<Image> shifted = {marked(3, 4), marked(4, 6)};
  const LmdResult r = lmd(shifted, gt, det);
  EXPECT_NEAR(r.distance, 5.0, 1e-12);
  EXPECT_EQ(r.frames_used, 2);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const double vx = rng.uniform(-10, 10), vy = rng.uniform(-10, 10);
    EXPECT_NEAR(lmd(std::vector<Image>{marked(vx, vy)}, std::vector<Image>{marked(0, 0)}, det)
                    .distance,
                std::hypot(vx, vy), 1e-9);
  }
}

TEST(Lmd, SkipsFailuresAndRejectsAllFailing) {
  const InjectedLandmarks det;
  const std::vector<Image> gen = {marked(3, 4), marked(0, 0, false)};
  const std::vector<Image> gt = {marked(0, 0), marked(0, 0)};
  const LmdResult r = lmd(gen, gt, det);
  EXPECT_NEAR(r.distance, 5.0, 1e-12);
  EXPECT_EQ(r.frames_used, 1);
  EXPECT_EQ(r.frames_skipped, 1);
  const std::vector<Image> bad = {marked(0, 0, false)};
  expect_error(ErrorCode::kNoValidFrames, [&] { lmd(bad, bad, det); });
}

TEST(Lmd, ToyFacesWithRealDetector) {
  const auto det = face::make_landmark_detector("toyface-v1");
  face::ToyAppearance look;
  std::vector<Image> faces;
  for (double o : {0.0, 0.5, 1.0}) faces.push_back(face::render_toy_face(kEvalCropSize, look, o));
  EXPECT_EQ(lmd(faces, faces, *det).distance, 0.0);
  const std::vector<Image> frozen(3, faces[0]);
  EXPECT_GT(lmd(frozen, faces, *det).distance, 0.5);
}

}  // namespace
}  // namespace hyperlips::eval
