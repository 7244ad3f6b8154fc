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

#ifndef HYPERLIPS_FACE_FACE_OPS_H_
#define HYPERLIPS_FACE_FACE_OPS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"

namespace hyperlips::face {

class LandmarkDetector;

struct FaceBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int64_t area() const { return static_cast<int64_t>(w) * h; }
  bool inside(int width, int height) const {
    return w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
  }
  bool operator==(const FaceBox&) const = default;
};

inline constexpr int kDefaultCropSize = 128;

// Crops `box` and resizes it to size x size. The box must be non-empty and
// lie inside the frame.
Image crop_face(const RgbFrame& frame, const FaceBox& box, int size = kDefaultCropSize);
Image crop_face(const Image& frame, const FaceBox& box, int size = kDefaultCropSize);

// Per-coordinate median of the detected boxes in a centred window of
// `window` frames; frames without a detection stay empty.
std::vector<std::optional<FaceBox>> median_smooth_boxes(
    std::span<const std::optional<FaceBox>> boxes, int window = 5);

// Shifts and, if needed, shrinks `box` so it lies inside the frame.
FaceBox clamp_box(const FaceBox& box, int width, int height);

// Zeroes rows [S/2, S).
Image mask_lower_half(const Image& face);

// Resizes `face` to the box and composites it. With `alpha` (1 x S x S, at
// face resolution) the result is alpha * face + (1 - alpha) * frame.
RgbFrame paste_back(const RgbFrame& frame, const Image& face, const FaceBox& box,
                    const Image* alpha = nullptr);

// 1 x size x size binary raster of the schema contours.
Image render_sketch(const LandmarkSet& lm, int size);

// Bresenham line between two integer pixels, clipped to the raster.
void draw_line(Image& raster, int x0, int y0, int x1, int y1);

struct LipRegion {
  // Half-open pixel bounds inside the crop.
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  // 1 x S x S, 1 inside the outer lip polygon.
  Image mask;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Bounding box of the outer lip contour dilated by 5%, clipped to a square
// image of side `size`; the mask is the filled outer contour.
LipRegion lip_region(const LandmarkSet& lm, int size);

// Height in pixels of the outer lip contour's bounding box.
double lip_height(const LandmarkSet& lm);

enum class ReferencePolicy { kRandom, kFixed };

struct ReferenceOptions {
  ReferencePolicy policy = ReferencePolicy::kFixed;
  // Explicit frame for the fixed policy; the closed-mouth heuristic otherwise.
  std::optional<int> fixed_index;
  uint64_t seed = 0;
  // Frame that must not be chosen under the random policy.
  int target_index = -1;
};

// Random: uniform over the other frames. Fixed: `fixed_index`, or the frame
// whose outer lip box is shortest.
int select_reference(std::span<const Image> faces, const ReferenceOptions& options,
                     const LandmarkDetector* detector = nullptr);

}  // namespace hyperlips::face

#endif  // HYPERLIPS_FACE_FACE_OPS_H_
