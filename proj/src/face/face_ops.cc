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

#include "hyperlips/face/face_ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperlips/error.h"
#include "hyperlips/face/detector.h"
#include "hyperlips/rng.h"

namespace hyperlips::face {
namespace {

void require_box(const FaceBox& box, int width, int height) {
  require(box.w > 0 && box.h > 0, ErrorCode::kDegenerateBox, "face box has zero area");
  require(box.inside(width, height), ErrorCode::kDegenerateBox, "face box leaves the frame");
}

bool inside_polygon(std::span<const Point> poly, double x, double y) {
  bool in = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

std::span<const Point> complete_contour(const LandmarkSet& lm, const Contour& c) {
  auto pts = lm.contour(c);
  const bool ok = !pts.empty() && std::none_of(pts.begin(), pts.end(),
                                               [](const Point& p) { return p.missing(); });
  require(ok, ErrorCode::kMissingLipLandmarks, "landmark set lacks the outer lip contour");
  return pts;
}

}  // namespace

LandmarkSet LandmarkSet::rescaled(int size) const {
  require(image_size > 0 && size > 0, ErrorCode::kInvalidArgument, "landmark image size unset");
  LandmarkSet out = *this;
  out.image_size = size;
  const double f = static_cast<double>(size) / image_size;
  for (Point& p : out.points) p = {p.x * f, p.y * f};
  return out;
}

std::vector<Point> lip_points(const LandmarkSet& lm) {
  std::vector<Point> out;
  for (const Contour& c : {kLipOuter, kLipInner})
    for (const Point& p : lm.contour(c)) out.push_back(p);
  return out;
}

Image crop_face(const Image& frame, const FaceBox& box, int size) {
  require_box(box, frame.width, frame.height);
  require(size > 0, ErrorCode::kInvalidArgument, "crop size must be positive");
  Image sub(frame.channels, box.h, box.w);
  for (int c = 0; c < frame.channels; ++c)
    for (int y = 0; y < box.h; ++y)
      for (int x = 0; x < box.w; ++x) sub.at(c, y, x) = frame.at(c, box.y + y, box.x + x);
  return resize_bilinear(sub, size, size);
}

Image crop_face(const RgbFrame& frame, const FaceBox& box, int size) {
  require_box(box, frame.width, frame.height);
  Image sub(3, box.h, box.w);
  for (int y = 0; y < box.h; ++y)
    for (int x = 0; x < box.w; ++x)
      for (int c = 0; c < 3; ++c) sub.at(c, y, x) = frame.at(box.y + y, box.x + x, c) / 255.0;
  return resize_bilinear(sub, size, size);
}

std::vector<std::optional<FaceBox>> median_smooth_boxes(
    std::span<const std::optional<FaceBox>> boxes, int window) {
  require(window >= 1 && window % 2 == 1, ErrorCode::kInvalidArgument,
          "smoothing window must be odd and positive");
  const int n = static_cast<int>(boxes.size());
  const int half = window / 2;
  std::vector<std::optional<FaceBox>> out(boxes.size());
  std::vector<int> xs, ys, ws, hs;
  const auto median = [](std::vector<int>& v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  for (int i = 0; i < n; ++i) {
    if (!boxes[i]) continue;
    xs.clear(), ys.clear(), ws.clear(), hs.clear();
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      if (!boxes[j]) continue;
      xs.push_back(boxes[j]->x);
      ys.push_back(boxes[j]->y);
      ws.push_back(boxes[j]->w);
      hs.push_back(boxes[j]->h);
    }
    out[i] = FaceBox{median(xs), median(ys), median(ws), median(hs)};
  }
  return out;
}

FaceBox clamp_box(const FaceBox& box, int width, int height) {
  FaceBox out = box;
  out.w = std::min(out.w, width);
  out.h = std::min(out.h, height);
  out.x = std::clamp(out.x, 0, width - out.w);
  out.y = std::clamp(out.y, 0, height - out.h);
  return out;
}

Image mask_lower_half(const Image& face) {
  Image out = face;
  for (int c = 0; c < out.channels; ++c)
    for (int y = out.height / 2; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x) out.at(c, y, x) = 0.0;
  return out;
}

RgbFrame paste_back(const RgbFrame& frame, const Image& face, const FaceBox& box,
                    const Image* alpha) {
  require_box(box, frame.width, frame.height);
  require(face.channels == 3, ErrorCode::kShapeMismatch, "paste_back needs an RGB face");
  const Image resized = resize_bilinear(face, box.h, box.w);
  Image weight;
  if (alpha != nullptr) {
    require(alpha->channels == 1, ErrorCode::kShapeMismatch, "blend mask must be single-channel");
    weight = resize_bilinear(*alpha, box.h, box.w);
  }
  RgbFrame out = frame;
  for (int y = 0; y < box.h; ++y)
    for (int x = 0; x < box.w; ++x) {
      const double a = alpha != nullptr ? std::clamp(weight.at(0, y, x), 0.0, 1.0) : 1.0;
      for (int c = 0; c < 3; ++c) {
        const double orig = frame.at(box.y + y, box.x + x, c) / 255.0;
        const double v = std::clamp(a * resized.at(c, y, x) + (1.0 - a) * orig, 0.0, 1.0);
        out.at(box.y + y, box.x + x, c) = static_cast<uint8_t>(std::lround(v * 255.0));
      }
    }
  return out;
}

void draw_line(Image& raster, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < raster.width && y0 < raster.height) raster.at(0, y0, x0) = 1.0;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

Image render_sketch(const LandmarkSet& lm, int size) {
  Image sketch(1, size, size);
  if (lm.empty()) return sketch;
  const LandmarkSet scaled = lm.rescaled(size);
  auto pixel = [](const Point& p) {
    return std::pair{static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
  };
  for (const Contour& c : kContours) {
    auto pts = scaled.contour(c);
    const size_t n = pts.size();
    if (n == 0) continue;
    const size_t segments = c.closed && n > 2 ? n : n - 1;
    if (n == 1 && !pts[0].missing()) {
      auto [x, y] = pixel(pts[0]);
      draw_line(sketch, x, y, x, y);
    }
    for (size_t i = 0; i < segments; ++i) {
      const Point& a = pts[i];
      const Point& b = pts[(i + 1) % n];
      if (a.missing() || b.missing()) continue;
      auto [ax, ay] = pixel(a);
      auto [bx, by] = pixel(b);
      draw_line(sketch, ax, ay, bx, by);
    }
  }
  return sketch;
}

LipRegion lip_region(const LandmarkSet& lm, int size) {
  require(lm.image_size > 0, ErrorCode::kMissingLipLandmarks, "landmark set is empty");
  const LandmarkSet scaled = lm.rescaled(size);
  const auto outer = complete_contour(scaled, kLipOuter);
  double min_x = std::numeric_limits<double>::max(), min_y = min_x;
  double max_x = std::numeric_limits<double>::lowest(), max_y = max_x;
  for (const Point& p : outer) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double pad_x = 0.025 * (max_x - min_x), pad_y = 0.025 * (max_y - min_y);
  LipRegion r;
  r.x0 = std::clamp(static_cast<int>(std::floor(min_x - pad_x)), 0, size);
  r.y0 = std::clamp(static_cast<int>(std::floor(min_y - pad_y)), 0, size);
  r.x1 = std::clamp(static_cast<int>(std::ceil(max_x + pad_x)), 0, size);
  r.y1 = std::clamp(static_cast<int>(std::ceil(max_y + pad_y)), 0, size);
  require(r.x1 > r.x0 && r.y1 > r.y0, ErrorCode::kEmptyLipRegion, "lip box is empty");
  r.mask = Image(1, size, size);
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x)
      if (inside_polygon(outer, x + 0.5, y + 0.5)) r.mask.at(0, y, x) = 1.0;
  return r;
}

double lip_height(const LandmarkSet& lm) {
  const auto outer = complete_contour(lm, kLipOuter);
  const auto [lo, hi] = std::minmax_element(
      outer.begin(), outer.end(), [](const Point& a, const Point& b) { return a.y < b.y; });
  return hi->y - lo->y;
}

int select_reference(std::span<const Image> faces, const ReferenceOptions& options,
                     const LandmarkDetector* detector) {
  require(!faces.empty(), ErrorCode::kEmptySequence, "no frames to choose a reference from");
  const int n = static_cast<int>(faces.size());
  if (options.policy == ReferencePolicy::kRandom) {
    if (n == 1) return 0;
    Rng rng(options.seed);
    if (options.target_index < 0 || options.target_index >= n)
      return static_cast<int>(rng.randint(0, n));
    const int pick = static_cast<int>(rng.randint(0, n - 1));
    return pick >= options.target_index ? pick + 1 : pick;
  }
  if (options.fixed_index) {
    require(*options.fixed_index >= 0 && *options.fixed_index < n, ErrorCode::kIndexOutOfRange,
            "reference frame index out of range");
    return *options.fixed_index;
  }
  if (n == 1) return 0;
  require(detector != nullptr, ErrorCode::kInvalidArgument,
          "closed-mouth reference selection needs a landmark detector");
  int best = -1;
  double best_height = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    try {
      const LandmarkSet lm = detector->detect(faces[i]);
      const double h = lip_height(lm) / lm.image_size;
      if (h < best_height) {
        best_height = h;
        best = i;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kLandmarkFailure) throw;
    }
  }
  require(best >= 0, ErrorCode::kLandmarkFailure, "no frame yielded lip landmarks");
  return best;
}

}  // namespace hyperlips::face
