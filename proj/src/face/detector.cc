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

#include "hyperlips/face/detector.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "hyperlips/error.h"
#include "hyperlips/face/toy_face.h"

namespace hyperlips::face {
namespace {

using G = ToyGeometry;
using Rgb = std::array<double, 3>;

double median(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double colour_distance(const Rgb& a, const Rgb& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

Rgb pixel(const Image& img, int x, int y) {
  return {img.at(0, y, x), img.at(1, y, x), img.at(2, y, x)};
}

Rgb border_median(const Image& img) {
  std::array<std::vector<double>, 3> ch;
  for (int x = 0; x < img.width; ++x)
    for (int y : {0, img.height - 1})
      for (int c = 0; c < 3; ++c) ch[c].push_back(img.at(c, y, x));
  for (int y = 1; y + 1 < img.height; ++y)
    for (int x : {0, img.width - 1})
      for (int c = 0; c < 3; ++c) ch[c].push_back(img.at(c, y, x));
  return {median(ch[0]), median(ch[1]), median(ch[2])};
}

struct Moments {
  double weight = 0, mean_x = 0, mean_y = 0, var_x = 0, var_y = 0;

  // Semi-axes of the uniform ellipse with these second moments.
  double radius_x() const { return 2.0 * std::sqrt(var_x); }
  double radius_y() const { return 2.0 * std::sqrt(var_y); }
};

// Maps head-box units onto crop pixels using the fitted head ellipse.
struct HeadFrame {
  double x0, y0, side_x, side_y;

  double x(double u) const { return x0 + u * side_x; }
  double y(double v) const { return y0 + v * side_y; }
};

struct Window {
  int x0, y0, x1, y1;
};

Window window(const HeadFrame& head, double u0, double u1, double v0, double v1, int size) {
  auto cl = [size](double p) { return std::clamp(static_cast<int>(std::lround(p)), 0, size); };
  return {cl(head.x(u0)), cl(head.y(v0)), cl(head.x(u1)), cl(head.y(v1))};
}

Moments moments(const Window& w, const std::function<double(int, int)>& weight) {
  Moments m;
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int y = w.y0; y < w.y1; ++y)
    for (int x = w.x0; x < w.x1; ++x) {
      const double k = weight(x, y);
      if (k <= 0) continue;
      const double px = x + 0.5, py = y + 0.5;
      m.weight += k;
      sx += k * px;
      sy += k * py;
      sxx += k * px * px;
      syy += k * py * py;
    }
  if (m.weight <= 0) return m;
  m.mean_x = sx / m.weight;
  m.mean_y = sy / m.weight;
  m.var_x = std::max(0.0, sxx / m.weight - m.mean_x * m.mean_x);
  m.var_y = std::max(0.0, syy / m.weight - m.mean_y * m.mean_y);
  return m;
}

double ramp(double value, double lo, double hi) { return std::clamp((value - lo) / (hi - lo), 0.0, 1.0); }

void add_ellipse(std::vector<Point>& pts, double cx, double cy, double rx, double ry, int count) {
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    pts.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
}

}  // namespace

FaceBox ToyFaceDetector::detect(const RgbFrame& frame) const {
  require(frame.width > 2 && frame.height > 2, ErrorCode::kNoFace, "frame too small");
  const Image img = to_image(frame);
  const Rgb bg = border_median(img);
  const int w = frame.width, h = frame.height;
  std::vector<uint8_t> fg(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) fg[y * w + x] = colour_distance(pixel(img, x, y), bg) > 0.2;

  std::vector<int> label(fg.size(), -1);
  FaceBox best;
  int64_t best_area = 0;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (!fg[start] || label[start] >= 0) continue;
    int min_x = w, min_y = h, max_x = -1, max_y = -1;
    int64_t area = 0;
    stack.assign(1, start);
    label[start] = start;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int x = p % w, y = p / w;
      ++area;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto [nx, ny] : nbr) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int q = ny * w + nx;
        if (fg[q] && label[q] < 0) {
          label[q] = start;
          stack.push_back(q);
        }
      }
    }
    if (area > best_area) {
      best_area = area;
      best = FaceBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
    }
  }
  const int64_t min_area = std::max<int64_t>(16, static_cast<int64_t>(w) * h / 500);
  require(best_area >= min_area, ErrorCode::kNoFace, "no face found in frame");
  return best;
}

LandmarkSet ToyLandmarkDetector::detect(const Image& face) const {
  require(face.channels == 3 && face.width == face.height && face.width >= 8,
          ErrorCode::kLandmarkFailure, "landmark detection needs a square RGB crop");
  const int size = face.width;
  const Rgb bg = border_median(face);

  // Head silhouette, filled row-wise because the head is convex.
  std::vector<uint8_t> fill(static_cast<size_t>(size) * size, 0);
  for (int y = 0; y < size; ++y) {
    int lo = size, hi = -1;
    for (int x = 0; x < size; ++x)
      if (colour_distance(pixel(face, x, y), bg) > 0.2) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    for (int x = lo; x <= hi; ++x) fill[y * size + x] = 1;
  }
  const Moments head_m = moments({0, 0, size, size},
                                 [&](int x, int y) { return static_cast<double>(fill[y * size + x]); });
  require(head_m.weight >= 0.05 * size * size, ErrorCode::kLandmarkFailure, "no face in crop");
  const double head_rx = head_m.radius_x(), head_ry = head_m.radius_y();
  require(head_rx >= 0.1 * size && head_ry >= 0.1 * size, ErrorCode::kLandmarkFailure,
          "face region too small");
  const HeadFrame head{head_m.mean_x - head_rx, head_m.mean_y - head_ry, 2 * head_rx, 2 * head_ry};

  std::array<std::vector<double>, 3> cheek;
  for (double u0 : {0.14, 0.72}) {
    const Window w = window(head, u0, u0 + 0.14, 0.45, 0.56, size);
    for (int y = w.y0; y < w.y1; ++y)
      for (int x = w.x0; x < w.x1; ++x)
        for (int c = 0; c < 3; ++c) cheek[c].push_back(face.at(c, y, x));
  }
  require(!cheek[0].empty(), ErrorCode::kLandmarkFailure, "cheek region empty");
  const Rgb skin{median(cheek[0]), median(cheek[1]), median(cheek[2])};
  auto feature = [&](int x, int y) { return ramp(colour_distance(pixel(face, x, y), skin), 0.05, 0.3); };

  LandmarkSet lm;
  lm.image_size = size;
  lm.points.reserve(kNumLandmarks);
  for (int k = 0; k < kJaw.count; ++k) {
    const double a = k * std::numbers::pi / 8;
    lm.points.push_back({head_m.mean_x + head_rx * std::cos(a), head_m.mean_y + head_ry * std::sin(a)});
  }

  for (double eu : G::kEyeU) {
    const Window w = window(head, eu - 0.16, eu + 0.16, 0.2, 0.315, size);
    std::vector<double> column(w.x1 - w.x0, 0.0);
    for (int x = w.x0; x < w.x1; ++x)
      for (int y = w.y0; y < w.y1; ++y) column[x - w.x0] += feature(x, y);
    const double peak = column.empty() ? 0.0 : *std::max_element(column.begin(), column.end());
    require(peak > 0.5, ErrorCode::kLandmarkFailure, "brow not found");
    int first = -1, last = -1;
    for (int i = 0; i < static_cast<int>(column.size()); ++i)
      if (column[i] > 0.5 * peak) {
        if (first < 0) first = i;
        last = i;
      }
    auto centroid_y = [&](int col) {
      const int x = w.x0 + col;
      return moments({x, w.y0, x + 1, w.y1}, feature).mean_y;
    };
    const int mid = (first + last) / 2;
    lm.points.push_back({static_cast<double>(w.x0 + first), centroid_y(first)});
    lm.points.push_back({w.x0 + mid + 0.5, centroid_y(mid)});
    lm.points.push_back({static_cast<double>(w.x0 + last + 1), centroid_y(last)});
  }

  for (double eu : G::kEyeU) {
    const Moments m = moments(window(head, eu - 0.14, eu + 0.14, 0.32, 0.45, size), feature);
    require(m.weight > 1.0, ErrorCode::kLandmarkFailure, "eye not found");
    add_ellipse(lm.points, m.mean_x, m.mean_y, m.radius_x(), m.radius_y(), kEyeLeft.count);
  }

  lm.points.push_back({head.x(0.5), head.y(G::kNoseTopV)});
  lm.points.push_back({head.x(0.5), head.y(G::kNoseBaseV)});
  lm.points.push_back({head.x(0.5 - G::kNoseHalfWidth), head.y(G::kNoseBaseV)});
  lm.points.push_back({head.x(0.5 + G::kNoseHalfWidth), head.y(G::kNoseBaseV)});

  const Window mouth = window(head, 0.27, 0.73, 0.605, 0.915, size);
  const Moments outer = moments(mouth, feature);
  require(outer.weight > 2.0, ErrorCode::kLandmarkFailure, "mouth not found");
  add_ellipse(lm.points, outer.mean_x, outer.mean_y, outer.radius_x(), outer.radius_y(),
              kLipOuter.count);
  const Moments inner = moments(mouth, [&](int x, int y) {
    return ramp(0.25 - luminance(face.at(0, y, x), face.at(1, y, x), face.at(2, y, x)), 0.0, 0.15);
  });
  if (inner.weight > 0.5) {
    add_ellipse(lm.points, inner.mean_x, inner.mean_y, inner.radius_x(), inner.radius_y(),
                kLipInner.count);
  } else {
    add_ellipse(lm.points, outer.mean_x, outer.mean_y, 0.8 * outer.radius_x(), 0.0, kLipInner.count);
  }

  for (Point& p : lm.points) {
    p.x = std::clamp(p.x, 0.0, static_cast<double>(size));
    p.y = std::clamp(p.y, 0.0, static_cast<double>(size));
  }
  return lm;
}

std::vector<std::optional<FaceBox>> track_faces(std::span<const RgbFrame> frames,
                                                const FaceDetector& detector) {
  std::vector<std::optional<FaceBox>> raw(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    try {
      raw[i] = detector.detect(frames[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoFace) throw;
    }
  }
  auto smooth = median_smooth_boxes(raw);
  for (size_t i = 0; i < frames.size(); ++i)
    if (smooth[i]) smooth[i] = clamp_box(*smooth[i], frames[i].width, frames[i].height);
  return smooth;
}

std::unique_ptr<FaceDetector> make_face_detector(std::string_view id) {
  require(id == kToyFaceSchema, ErrorCode::kInvalidArgument,
          "unknown face detector '" + std::string(id) + "'");
  return std::make_unique<ToyFaceDetector>();
}

std::unique_ptr<LandmarkDetector> make_landmark_detector(std::string_view id) {
  require(id == kToyFaceSchema, ErrorCode::kInvalidArgument,
          "unknown landmark detector '" + std::string(id) + "'");
  return std::make_unique<ToyLandmarkDetector>();
}

}  // namespace hyperlips::face
