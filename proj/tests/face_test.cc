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
#include <set>

#include "hyperlips/error.h"
#include "hyperlips/face/detector.h"
#include "hyperlips/face/face_ops.h"
#include "hyperlips/face/toy_face.h"
#include "hyperlips/rng.h"
#include "test_util.h"

namespace hyperlips::face {
namespace {

using hyperlips::testing::expect_error;

RgbFrame blank_frame(int w, int h, uint8_t v = 40) { return RgbFrame(w, h, v); }

int64_t count_on(const Image& img) {
  return std::count_if(img.data.begin(), img.data.end(), [](double v) { return v != 0.0; });
}

// DDA rasteriser used as an independent oracle for sketches.
int64_t oracle_sketch_pixels(const LandmarkSet& lm, int size) {
  const LandmarkSet s = lm.rescaled(size);
  std::set<std::pair<int, int>> on;
  for (const Contour& c : kContours) {
    auto pts = s.contour(c);
    const size_t n = pts.size();
    const size_t segments = c.closed ? n : n - 1;
    for (size_t i = 0; i < segments; ++i) {
      const double ax = std::floor(pts[i].x), ay = std::floor(pts[i].y);
      const double bx = std::floor(pts[(i + 1) % n].x), by = std::floor(pts[(i + 1) % n].y);
      const int steps = static_cast<int>(std::max({1.0, std::abs(bx - ax), std::abs(by - ay)}));
      for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const int x = static_cast<int>(std::floor(ax + t * (bx - ax) + 0.5));
        const int y = static_cast<int>(std::floor(ay + t * (by - ay) + 0.5));
        if (x >= 0 && y >= 0 && x < size && y < size) on.insert({x, y});
      }
    }
  }
  return static_cast<int64_t>(on.size());
}

TEST(DetectFace, FindsToyFaceWithinTwoPixels) {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const ToyAppearance look = random_appearance(rng);
    const ToyPose pose{rng.uniform(40, 56), rng.uniform(40, 56), rng.uniform(30, 38), rng.uniform()};
    const ToyFrame toy = render_toy_frame(96, 96, look, pose);
    const FaceBox box = ToyFaceDetector().detect(toy.frame);
    EXPECT_NEAR(box.x, toy.box.x, 2) << trial;
    EXPECT_NEAR(box.y, toy.box.y, 2) << trial;
    EXPECT_NEAR(box.w, toy.box.w, 2) << trial;
    EXPECT_NEAR(box.h, toy.box.h, 2) << trial;
  }
}

TEST(DetectFace, BlankFrameHasNoFace) {
  expect_error(ErrorCode::kNoFace, [] { ToyFaceDetector().detect(blank_frame(64, 64)); });
}

TEST(DetectFace, LargerOfTwoFacesWins) {
  ToyAppearance look;
  const ToyFrame small = render_toy_frame(200, 100, look, {50, 50, 25, 0.2});
  const ToyFrame large = render_toy_frame(200, 100, look, {145, 50, 40, 0.2});
  RgbFrame both = small.frame;
  for (int y = 0; y < 100; ++y)
    for (int x = 100; x < 200; ++x)
      for (int c = 0; c < 3; ++c) both.at(y, x, c) = large.frame.at(y, x, c);
  const FaceBox box = ToyFaceDetector().detect(both);
  EXPECT_NEAR(box.x, large.box.x, 2);
  EXPECT_NEAR(box.w, large.box.w, 2);
}

TEST(CropFace, SameSizeIsBitEqual) {
  const ToyFrame toy = render_toy_frame(160, 160, ToyAppearance{}, {80, 80, 64, 0.5});
  const FaceBox box{16, 16, 128, 128};
  const Image crop = crop_face(toy.frame, box, 128);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      for (int c = 0; c < 3; ++c)
        ASSERT_EQ(crop.at(c, y, x), toy.frame.at(16 + y, 16 + x, c) / 255.0);
}

TEST(CropFace, DoubleSizeBoxAveragesTwoByTwo) {
  Rng rng(2);
  RgbFrame frame(300, 280);
  for (auto& v : frame.rgb) v = static_cast<uint8_t>(rng.randint(0, 256));
  const FaceBox box{10, 5, 256, 256};
  const Image crop = crop_face(frame, box, 128);
  for (int y = 0; y < 128; y += 7)
    for (int x = 0; x < 128; x += 5)
      for (int c = 0; c < 3; ++c) {
        double sum = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) sum += frame.at(5 + 2 * y + dy, 10 + 2 * x + dx, c);
        EXPECT_NEAR(crop.at(c, y, x), sum / 4 / 255.0, 1e-12);
      }
}

TEST(CropFace, DegenerateBoxes) {
  const RgbFrame frame = blank_frame(64, 64);
  expect_error(ErrorCode::kDegenerateBox, [&] { crop_face(frame, FaceBox{10, 10, 0, 20}); });
  expect_error(ErrorCode::kDegenerateBox, [&] { crop_face(frame, FaceBox{50, 10, 20, 20}); });
}

TEST(MaskLowerHalf, ZeroesLowerRowsOnly) {
  for (int size : {128, 32}) {
    const Image ones(3, size, size, 1.0);
    const Image masked = mask_lower_half(ones);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) ASSERT_EQ(masked.at(c, y, x), y < size / 2 ? 1.0 : 0.0);
    EXPECT_TRUE(mask_lower_half(masked) == masked);
  }
}

TEST(MaskLowerHalf, PreservesUpperHalfBitExactly) {
  Rng rng(4);
  Image img(3, 32, 32);
  for (double& v : img.data) v = rng.uniform();
  const Image masked = mask_lower_half(img);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x) ASSERT_EQ(masked.at(c, y, x), img.at(c, y, x));
}

TEST(SelectReference, SingleFrameFixed) {
  const std::vector<Image> faces{render_toy_face(32, ToyAppearance{}, 0.3)};
  EXPECT_EQ(select_reference(faces, {}), 0);
}

TEST(SelectReference, RandomIsSeededAndExcludesTarget) {
  std::vector<Image> faces(7, Image(3, 4, 4));
  std::set<int> seen;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    ReferenceOptions opt{ReferencePolicy::kRandom, std::nullopt, seed, 3};
    const int a = select_reference(faces, opt);
    EXPECT_EQ(a, select_reference(faces, opt));
    EXPECT_NE(a, 3);
    seen.insert(a);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(SelectReference, FixedPicksClosedMouth) {
  const std::vector<double> openings{0.8, 0.5, 0.0, 0.6, 0.3};
  std::vector<Image> faces;
  double oracle_min = 1e9;
  int oracle = -1;
  for (size_t i = 0; i < openings.size(); ++i) {
    faces.push_back(render_toy_face(64, ToyAppearance{}, openings[i]));
    const double h = lip_height(toy_landmarks(0, 0, 64, openings[i], 64));
    if (h < oracle_min) {
      oracle_min = h;
      oracle = static_cast<int>(i);
    }
  }
  ToyLandmarkDetector detector;
  EXPECT_EQ(select_reference(faces, {}, &detector), oracle);
  EXPECT_EQ(oracle, 2);
  EXPECT_EQ(select_reference(faces, {ReferencePolicy::kFixed, 4, 0, -1}, &detector), 4);
  expect_error(ErrorCode::kEmptySequence, [] { select_reference(std::vector<Image>{}, {}); });
}

TEST(DetectLandmarks, WithinThreePixelsOfGroundTruth) {
  Rng rng(8);
  ToyLandmarkDetector detector;
  for (int trial = 0; trial < 6; ++trial) {
    const ToyAppearance look = random_appearance(rng);
    const double opening = trial / 5.0;
    const ToyFrame toy = render_toy_frame(160, 160, look, {80, 80, 64, opening});
    ASSERT_EQ(toy.box, (FaceBox{16, 16, 128, 128}));
    const LandmarkSet got = detector.detect(crop_face(toy.frame, toy.box, 128));
    ASSERT_EQ(got.points.size(), static_cast<size_t>(kNumLandmarks));
    for (int i = 0; i < kNumLandmarks; ++i) {
      const Point& e = toy.landmarks.points[i];
      const Point& g = got.points[i];
      EXPECT_LE(std::hypot(e.x - g.x, e.y - g.y), 3.0)
          << "trial " << trial << " point " << i << " expected (" << e.x << "," << e.y
          << ") got (" << g.x << "," << g.y << ")";
    }
  }
}

TEST(DetectLandmarks, BlankImageFailsAndRepeatIsIdentical) {
  ToyLandmarkDetector detector;
  expect_error(ErrorCode::kLandmarkFailure, [&] { detector.detect(Image(3, 64, 64, 0.3)); });
  const Image face = render_toy_face(64, ToyAppearance{}, 0.4);
  EXPECT_TRUE(detector.detect(face) == detector.detect(face));
}

TEST(DetectLandmarks, LipHeightGrowsWithOpeningAtToyResolution) {
  ToyLandmarkDetector detector;
  double previous = 0.0;
  for (double opening : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double h = lip_height(detector.detect(render_toy_face(32, ToyAppearance{}, opening)));
    EXPECT_GT(h, previous) << opening;
    previous = h;
  }
}

TEST(Sketch, EmptyLandmarksGiveEmptySketch) {
  EXPECT_EQ(count_on(render_sketch(LandmarkSet{}, 32)), 0);
}

TEST(Sketch, TwoPointContourIsBresenhamSegment) {
  LandmarkSet lm;
  lm.image_size = 32;
  lm.points.assign(kNumLandmarks, missing_point());
  lm.points[0] = {2.5, 3.5};
  lm.points[1] = {20.5, 9.5};
  const Image sketch = render_sketch(lm, 32);
  // One pixel per column between the endpoints, each within half a pixel
  // of the ideal line, endpoints included.
  EXPECT_EQ(count_on(sketch), 19);
  EXPECT_EQ(sketch.at(0, 3, 2), 1.0);
  EXPECT_EQ(sketch.at(0, 9, 20), 1.0);
  for (int x = 2; x <= 20; ++x) {
    int on = 0;
    for (int y = 0; y < 32; ++y)
      if (sketch.at(0, y, x) != 0.0) {
        ++on;
        EXPECT_LE(std::abs(y - (3 + (x - 2) * 6.0 / 18.0)), 0.5 + 1e-9);
      }
    EXPECT_EQ(on, 1) << x;
  }
}

TEST(Sketch, ToyFacePixelCountMatchesOracle) {
  for (double opening : {0.0, 0.5, 1.0}) {
    const LandmarkSet lm = toy_landmarks(0, 0, 128, opening, 128);
    for (int size : {32, 64, 128}) {
      const double got = static_cast<double>(count_on(render_sketch(lm, size)));
      const double want = static_cast<double>(oracle_sketch_pixels(lm, size));
      EXPECT_GT(got, 0);
      EXPECT_NEAR(got, want, 0.2 * want) << size;
    }
  }
}

TEST(Sketch, BinaryAndBoundedForArbitraryLandmarks) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    LandmarkSet lm;
    lm.image_size = 40;
    for (int i = 0; i < kNumLandmarks; ++i)
      lm.points.push_back({rng.uniform(-30, 70), rng.uniform(-30, 70)});
    const Image s = render_sketch(lm, 24);
    ASSERT_EQ(s.data.size(), 24u * 24u);
    for (double v : s.data) ASSERT_TRUE(v == 0.0 || v == 1.0);
  }
}

TEST(LipRegion, SquareContourGivesKnownBox) {
  LandmarkSet lm;
  lm.image_size = 64;
  lm.points.assign(kNumLandmarks, Point{32, 32});
  const Point square[12] = {{30, 30}, {30, 40}, {30, 50}, {20, 50}, {10, 50}, {10, 40},
                            {10, 30}, {10, 20}, {10, 10}, {20, 10}, {30, 10}, {30, 20}};
  for (int i = 0; i < 12; ++i) lm.points[kLipOuter.begin + i] = square[i];
  const LipRegion r = lip_region(lm, 64);
  EXPECT_EQ(r.x0, 9);
  EXPECT_EQ(r.x1, 31);
  EXPECT_EQ(r.y0, 9);
  EXPECT_EQ(r.y1, 51);
  EXPECT_EQ(count_on(r.mask), 20 * 40);
}

TEST(LipRegion, MaskInsideBoxAndMissingPoints) {
  for (double opening : {0.0, 0.6, 1.0}) {
    const LipRegion r = lip_region(toy_landmarks(0, 0, 32, opening, 32), 32);
    EXPECT_LE(count_on(r.mask), static_cast<int64_t>(r.width()) * r.height());
    EXPECT_GT(count_on(r.mask), 0);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (r.mask.at(0, y, x) != 0.0) {
          EXPECT_TRUE(x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1);
        }
  }
  LandmarkSet partial = toy_landmarks(0, 0, 32, 0.5, 32);
  partial.points[kLipOuter.begin + 3] = missing_point();
  expect_error(ErrorCode::kMissingLipLandmarks, [&] { lip_region(partial, 32); });
  LandmarkSet truncated = toy_landmarks(0, 0, 32, 0.5, 32);
  truncated.points.resize(20);
  expect_error(ErrorCode::kMissingLipLandmarks, [&] { lip_region(truncated, 32); });
}

TEST(PasteBack, IdentityRoundTrip) {
  const ToyFrame toy = render_toy_frame(160, 160, ToyAppearance{}, {80, 80, 64, 0.5});
  const FaceBox box{16, 16, 128, 128};
  EXPECT_TRUE(paste_back(toy.frame, crop_face(toy.frame, box, 128), box) == toy.frame);

  RgbFrame smooth(100, 100);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x)
      for (int c = 0; c < 3; ++c) smooth.at(y, x, c) = static_cast<uint8_t>(60 + x + y / 2 + c);
  const FaceBox small{20, 10, 64, 64};
  const RgbFrame back = paste_back(smooth, crop_face(smooth, small, 128), small);
  for (size_t i = 0; i < back.rgb.size(); ++i) EXPECT_LE(std::abs(back.rgb[i] - smooth.rgb[i]), 1);
}

TEST(PasteBack, ZeroFaceAndUntouchedOutside) {
  Rng rng(6);
  RgbFrame frame(80, 60);
  for (auto& v : frame.rgb) v = static_cast<uint8_t>(rng.randint(1, 256));
  for (int trial = 0; trial < 20; ++trial) {
    const int w = static_cast<int>(rng.randint(1, 40)), h = static_cast<int>(rng.randint(1, 40));
    const FaceBox box{static_cast<int>(rng.randint(0, 80 - w + 1)),
                      static_cast<int>(rng.randint(0, 60 - h + 1)), w, h};
    const RgbFrame out = paste_back(frame, Image(3, 32, 32, 0.0), box);
    for (int y = 0; y < 60; ++y)
      for (int x = 0; x < 80; ++x) {
        const bool in = x >= box.x && x < box.x + w && y >= box.y && y < box.y + h;
        for (int c = 0; c < 3; ++c)
          ASSERT_EQ(out.at(y, x, c), in ? 0 : frame.at(y, x, c));
      }
  }
  expect_error(ErrorCode::kDegenerateBox,
               [&] { paste_back(frame, Image(3, 8, 8), FaceBox{70, 50, 20, 20}); });
}

TEST(Detectors, FactoryKnowsToyId) {
  EXPECT_NE(make_face_detector("toyface-v1"), nullptr);
  EXPECT_NE(make_landmark_detector("toyface-v1"), nullptr);
  expect_error(ErrorCode::kInvalidArgument, [] { make_landmark_detector("mediapipe"); });
}

TEST(TrackBoxes, MedianSuppressesOutliersAndKeepsGaps) {
  std::vector<std::optional<FaceBox>> boxes;
  for (int i = 0; i < 9; ++i) boxes.push_back(FaceBox{10 + i, 20, 30, 30});
  boxes[4] = FaceBox{80, 90, 5, 5};
  boxes[7] = std::nullopt;
  const auto smooth = median_smooth_boxes(boxes);
  ASSERT_EQ(smooth.size(), boxes.size());
  EXPECT_EQ(*smooth[4], (FaceBox{15, 20, 30, 30}));
  EXPECT_FALSE(smooth[7].has_value());
  EXPECT_EQ(*smooth[0], (FaceBox{11, 20, 30, 30}));
  expect_error(ErrorCode::kInvalidArgument, [&] { median_smooth_boxes(boxes, 4); });
}

TEST(TrackBoxes, ClampKeepsBoxInsideFrame) {
  EXPECT_EQ(clamp_box({-5, 90, 40, 40}, 100, 100), (FaceBox{0, 60, 40, 40}));
  EXPECT_EQ(clamp_box({10, 10, 200, 50}, 100, 100), (FaceBox{0, 10, 100, 50}));
  EXPECT_TRUE(clamp_box({95, 95, 30, 30}, 100, 100).inside(100, 100));
}

}  // namespace
}  // namespace hyperlips::face
