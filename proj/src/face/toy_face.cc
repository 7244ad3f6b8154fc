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

#include "hyperlips/face/toy_face.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyperlips::face {
namespace {

using G = ToyGeometry;
constexpr int kSuperSample = 4;

double segment_distance(double u, double v, double au, double av, double bu, double bv) {
  const double du = bu - au, dv = bv - av;
  const double t = std::clamp(((u - au) * du + (v - av) * dv) / (du * du + dv * dv), 0.0, 1.0);
  return std::hypot(u - (au + t * du), v - (av + t * dv));
}

bool in_ellipse(double u, double v, double cu, double cv, double ru, double rv) {
  const double a = (u - cu) / ru, b = (v - cv) / rv;
  return a * a + b * b <= 1.0;
}

// Colour of the analytic face at head-box coordinates (u, v).
Color shade(double u, double v, const ToyAppearance& look, double opening) {
  if ((u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5) > 0.25) return look.background;
  const double inner_v = G::inner_radius_v(opening);
  const double outer_v = inner_v + G::kLipThickness;
  if (in_ellipse(u, v, G::kMouthU, G::kMouthV, G::kLipInnerRadiusU, inner_v)) return look.mouth;
  if (in_ellipse(u, v, G::kMouthU, G::kMouthV, G::kLipOuterRadiusU, outer_v)) return look.lips;
  for (double eu : G::kEyeU) {
    if (in_ellipse(u, v, eu, G::kEyeV, G::kEyeRadiusU, G::kEyeRadiusV)) return look.eyes;
    const double t = (u - eu) / G::kBrowHalfLength;
    if (std::abs(t) <= 1.0) {
      const double centre = G::kBrowV - G::kBrowArch * (1.0 - t * t);
      if (std::abs(v - centre) <= G::kBrowHalfThickness) return look.brows;
    }
  }
  const double nose = std::min(
      segment_distance(u, v, 0.5, G::kNoseTopV, 0.5, G::kNoseBaseV),
      segment_distance(u, v, 0.5 - G::kNoseHalfWidth, G::kNoseBaseV, 0.5 + G::kNoseHalfWidth,
                       G::kNoseBaseV));
  if (nose <= G::kNoseHalfThickness)
    return {look.skin[0] * 0.8, look.skin[1] * 0.8, look.skin[2] * 0.8};
  return look.skin;
}

Color jitter(Rng& rng, Color base, double amount) {
  for (double& c : base) c = std::clamp(c + rng.uniform(-amount, amount), 0.0, 1.0);
  return base;
}

double distance(const Color& a, const Color& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

}  // namespace

ToyAppearance random_appearance(Rng& rng) {
  ToyAppearance look;
  const double tone = rng.uniform();
  look.skin = jitter(rng, {0.74 + 0.16 * tone, 0.56 + 0.2 * tone, 0.46 + 0.18 * tone}, 0.03);
  look.lips = {rng.uniform(0.6, 0.8), rng.uniform(0.14, 0.26), rng.uniform(0.2, 0.3)};
  look.mouth = jitter(rng, {0.08, 0.02, 0.04}, 0.02);
  look.eyes = jitter(rng, {0.12, 0.1, 0.1}, 0.03);
  look.brows = {rng.uniform(0.2, 0.35), rng.uniform(0.12, 0.22), rng.uniform(0.08, 0.15)};
  do {
    look.background = {rng.uniform(0.02, 0.5), rng.uniform(0.02, 0.5), rng.uniform(0.02, 0.5)};
  } while (distance(look.background, look.skin) < 0.4 || distance(look.background, look.lips) < 0.25);
  return look;
}

LandmarkSet toy_landmarks(double x0, double y0, double side, double opening, int image_size) {
  LandmarkSet lm;
  lm.image_size = image_size;
  lm.points.reserve(kNumLandmarks);
  auto add = [&](double u, double v) { lm.points.push_back({x0 + u * side, y0 + v * side}); };
  const double pi = std::numbers::pi;
  for (int k = 0; k < kJaw.count; ++k)
    add(0.5 + 0.5 * std::cos(k * pi / 8), 0.5 + 0.5 * std::sin(k * pi / 8));
  for (double eu : G::kEyeU) {
    add(eu - G::kBrowHalfLength, G::kBrowV);
    add(eu, G::kBrowV - G::kBrowArch);
    add(eu + G::kBrowHalfLength, G::kBrowV);
  }
  for (double eu : G::kEyeU)
    for (int k = 0; k < kEyeLeft.count; ++k)
      add(eu + G::kEyeRadiusU * std::cos(k * pi / 3), G::kEyeV + G::kEyeRadiusV * std::sin(k * pi / 3));
  add(0.5, G::kNoseTopV);
  add(0.5, G::kNoseBaseV);
  add(0.5 - G::kNoseHalfWidth, G::kNoseBaseV);
  add(0.5 + G::kNoseHalfWidth, G::kNoseBaseV);
  const double inner_v = G::inner_radius_v(opening);
  const double outer_v = inner_v + G::kLipThickness;
  for (int k = 0; k < kLipOuter.count; ++k)
    add(G::kMouthU + G::kLipOuterRadiusU * std::cos(k * pi / 6),
        G::kMouthV + outer_v * std::sin(k * pi / 6));
  for (int k = 0; k < kLipInner.count; ++k)
    add(G::kMouthU + G::kLipInnerRadiusU * std::cos(k * pi / 4),
        G::kMouthV + inner_v * std::sin(k * pi / 4));
  return lm;
}

ToyFrame render_toy_frame(int width, int height, const ToyAppearance& look, const ToyPose& pose) {
  ToyFrame out;
  out.frame = RgbFrame(width, height);
  const double x0 = pose.cx - pose.radius, y0 = pose.cy - pose.radius, side = 2 * pose.radius;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Color acc{0, 0, 0};
      for (int sy = 0; sy < kSuperSample; ++sy)
        for (int sx = 0; sx < kSuperSample; ++sx) {
          const double px = x + (sx + 0.5) / kSuperSample, py = y + (sy + 0.5) / kSuperSample;
          const Color c = shade((px - x0) / side, (py - y0) / side, look, pose.opening);
          for (int k = 0; k < 3; ++k) acc[k] += c[k];
        }
      for (int k = 0; k < 3; ++k)
        out.frame.at(y, x, k) = static_cast<uint8_t>(
            std::lround(acc[k] / (kSuperSample * kSuperSample) * 255.0));
    }
  }
  const int side_px = static_cast<int>(std::lround(side));
  out.box = FaceBox{static_cast<int>(std::lround(x0)), static_cast<int>(std::lround(y0)), side_px,
                    side_px};
  out.landmarks = toy_landmarks(x0 - out.box.x, y0 - out.box.y, side, pose.opening, side_px);
  return out;
}

Image render_toy_face(int size, const ToyAppearance& look, double opening) {
  Image img(3, size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      Color acc{0, 0, 0};
      for (int sy = 0; sy < kSuperSample; ++sy)
        for (int sx = 0; sx < kSuperSample; ++sx) {
          const Color c = shade((x + (sx + 0.5) / kSuperSample) / size,
                                (y + (sy + 0.5) / kSuperSample) / size, look, opening);
          for (int k = 0; k < 3; ++k) acc[k] += c[k];
        }
      for (int k = 0; k < 3; ++k) img.at(k, y, x) = acc[k] / (kSuperSample * kSuperSample);
    }
  return img;
}

}  // namespace hyperlips::face
