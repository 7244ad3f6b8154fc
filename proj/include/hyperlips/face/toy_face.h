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

#ifndef HYPERLIPS_FACE_TOY_FACE_H_
#define HYPERLIPS_FACE_TOY_FACE_H_

#include <array>

#include "hyperlips/face/face_ops.h"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"
#include "hyperlips/rng.h"

namespace hyperlips::face {

using Color = std::array<double, 3>;

// Layout of the analytic face in head-box units (u right, v down, [0, 1]).
struct ToyGeometry {
  static constexpr double kEyeU[2] = {0.32, 0.68};
  static constexpr double kEyeV = 0.38;
  static constexpr double kEyeRadiusU = 0.075;
  static constexpr double kEyeRadiusV = 0.035;
  static constexpr double kBrowV = 0.27;
  static constexpr double kBrowArch = 0.025;
  static constexpr double kBrowHalfLength = 0.11;
  static constexpr double kBrowHalfThickness = 0.013;
  static constexpr double kNoseTopV = 0.46;
  static constexpr double kNoseBaseV = 0.575;
  static constexpr double kNoseHalfWidth = 0.045;
  static constexpr double kNoseHalfThickness = 0.01;
  static constexpr double kMouthU = 0.5;
  static constexpr double kMouthV = 0.76;
  static constexpr double kLipOuterRadiusU = 0.2;
  static constexpr double kLipInnerRadiusU = 0.16;
  static constexpr double kLipThickness = 0.035;
  static constexpr double kMinOpening = 0.012;
  static constexpr double kOpeningRange = 0.09;

  // Inner lip half-height for an opening in [0, 1].
  static double inner_radius_v(double opening) { return kMinOpening + kOpeningRange * opening; }
};

struct ToyAppearance {
  Color background{0.15, 0.2, 0.35};
  Color skin{0.88, 0.72, 0.6};
  Color lips{0.72, 0.22, 0.28};
  Color mouth{0.08, 0.02, 0.04};
  Color eyes{0.12, 0.1, 0.1};
  Color brows{0.3, 0.2, 0.12};
};

ToyAppearance random_appearance(Rng& rng);

// Head circle in frame pixels plus mouth opening in [0, 1].
struct ToyPose {
  double cx = 48.0;
  double cy = 48.0;
  double radius = 38.0;
  double opening = 0.0;
};

struct ToyFrame {
  RgbFrame frame;
  FaceBox box;
  // Coordinates inside `box` at its native resolution (image_size == box.w).
  LandmarkSet landmarks;
};

ToyFrame render_toy_frame(int width, int height, const ToyAppearance& look, const ToyPose& pose);

// Face already aligned to a size x size crop.
Image render_toy_face(int size, const ToyAppearance& look, double opening);

// Ground-truth landmarks of a face whose head box is [x0, x0 + side)^2, in
// the same pixel units.
LandmarkSet toy_landmarks(double x0, double y0, double side, double opening, int image_size);

}  // namespace hyperlips::face

#endif  // HYPERLIPS_FACE_TOY_FACE_H_
