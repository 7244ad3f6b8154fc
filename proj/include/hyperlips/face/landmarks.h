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

#ifndef HYPERLIPS_FACE_LANDMARKS_H_
#define HYPERLIPS_FACE_LANDMARKS_H_

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlips::face {

// Continuous pixel coordinates: pixel (i, j) covers [i, i + 1) x [j, j + 1).
struct Point {
  double x = 0.0;
  double y = 0.0;

  bool missing() const { return std::isnan(x) || std::isnan(y); }
  bool operator==(const Point&) const = default;
};

inline Point missing_point() { return {std::nan(""), std::nan("")}; }

struct Contour {
  std::string_view name;
  int begin;
  int count;
  bool closed;
};

inline constexpr std::string_view kToyFaceSchema = "toyface-v1";

// Point layout of the toyface-v1 schema.
inline constexpr Contour kJaw{"jaw", 0, 9, false};
inline constexpr Contour kBrowLeft{"brow_left", 9, 3, false};
inline constexpr Contour kBrowRight{"brow_right", 12, 3, false};
inline constexpr Contour kEyeLeft{"eye_left", 15, 6, true};
inline constexpr Contour kEyeRight{"eye_right", 21, 6, true};
inline constexpr Contour kNose{"nose", 27, 4, false};
inline constexpr Contour kLipOuter{"lip_outer", 31, 12, true};
inline constexpr Contour kLipInner{"lip_inner", 43, 8, true};
inline constexpr int kNumLandmarks = 51;
inline constexpr Contour kContours[] = {kJaw,     kBrowLeft, kBrowRight, kEyeLeft,
                                        kEyeRight, kNose,    kLipOuter,  kLipInner};

struct LandmarkSet {
  std::string schema_id{kToyFaceSchema};
  // Side length of the square image the points refer to.
  int image_size = 0;
  std::vector<Point> points;

  bool empty() const { return points.empty(); }
  std::span<const Point> contour(const Contour& c) const {
    if (static_cast<int>(points.size()) < c.begin + c.count) return {};
    return std::span<const Point>(points).subspan(c.begin, c.count);
  }
  // Same set expressed for a square image of side `size`.
  LandmarkSet rescaled(int size) const;
  bool operator==(const LandmarkSet&) const = default;
};

// Points of both lip contours, the subset used by the lip-distance metric.
std::vector<Point> lip_points(const LandmarkSet& lm);

}  // namespace hyperlips::face

#endif  // HYPERLIPS_FACE_LANDMARKS_H_
