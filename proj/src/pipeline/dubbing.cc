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

#include "hyperlips/pipeline/dubbing.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hyperlips/error.h"
#include "hyperlips/face/detector.h"
#include "hyperlips/face/face_ops.h"
#include "hyperlips/media/audio.h"
#include "hyperlips/media/mel.h"
#include "hyperlips/media/video.h"
#include "hyperlips/model/inputs.h"
#include "hyperlips/nn/tensor.h"
#include "hyperlips/train/trainer.h"

namespace hyperlips::pipeline {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kDetectorId = "toyface-v1";
constexpr int kSamplesPerFrame = media::kSampleRate / media::kVideoFps;

std::vector<face::Point> present(std::span<const face::Point> pts) {
  std::vector<face::Point> out;
  for (const auto& p : pts)
    if (!p.missing()) out.push_back(p);
  return out;
}

double cross(const face::Point& o, const face::Point& a, const face::Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<face::Point> convex_hull(std::vector<face::Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  std::vector<face::Point> hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_polygon(std::span<const face::Point> poly, double x, double y) {
  bool in = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

double segment_distance(const face::Point& a, const face::Point& b, double x, double y) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0 ? std::clamp(((x - a.x) * dx + (y - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(x - (a.x + t * dx), y - (a.y + t * dy));
}

bool near_polyline(std::span<const face::Point> line, double x, double y, double radius,
                   bool closed) {
  if (line.size() == 1) return std::hypot(x - line[0].x, y - line[0].y) <= radius;
  const size_t segments = closed ? line.size() : line.size() - 1;
  for (size_t i = 0; i < segments; ++i)
    if (segment_distance(line[i], line[(i + 1) % line.size()], x, y) <= radius) return true;
  return false;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double total = 0;
  for (int i = -radius; i <= radius; ++i) total += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= total;
  return k;
}

Image blur(const Image& src, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2), h = src.height, w = src.width;
  Image tmp(1, h, w), out(1, h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * src.at(0, y, std::clamp(x + i, 0, w - 1));
      tmp.at(0, y, x) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(0, std::clamp(y + i, 0, h - 1), x);
      out.at(0, y, x) = acc;
    }
  return out;
}


}  // namespace

Image face_mask_alpha(const Image& face, const face::LandmarkSet& lm) {
  require(face.height == face.width && face.height > 0, ErrorCode::kShapeMismatch,
          "fusion mask needs a square face");
  const auto all = present(lm.points);
  require(all.size() >= 3, ErrorCode::kLandmarkFailure, "fusion mask needs landmarks");
  const int s = face.height;
  const double scale = lm.image_size > 0 ? static_cast<double>(s) / lm.image_size : 1.0;
  const auto to_mask = [&](std::vector<face::Point> pts) {
    for (auto& p : pts) p = {p.x * scale, p.y * scale};
    return pts;
  };
  const auto hull = convex_hull(to_mask(all));
  const auto eye_l = to_mask(present(lm.contour(face::kEyeLeft)));
  const auto eye_r = to_mask(present(lm.contour(face::kEyeRight)));
  const auto brow_l = to_mask(present(lm.contour(face::kBrowLeft)));
  const auto brow_r = to_mask(present(lm.contour(face::kBrowRight)));
  const auto nose = to_mask(present(lm.contour(face::kNose)));
  const auto nose_hull = convex_hull(nose);
  const double band = s / 32.0;

  Image region(1, s, s), excluded(1, s, s);
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      bool out = false;
      for (const auto* eye : {&eye_l, &eye_r})
        if (!eye->empty())
          out = out || (eye->size() >= 3 && inside_polygon(*eye, px, py)) ||
                near_polyline(*eye, px, py, band, true);
      for (const auto* line : {&brow_l, &brow_r, &nose})
        if (!line->empty()) out = out || near_polyline(*line, px, py, band, false);
      if (nose_hull.size() >= 3) out = out || inside_polygon(nose_hull, px, py);
      excluded.at(0, y, x) = out ? 1.0 : 0.0;
      region.at(0, y, x) = !out && inside_polygon(hull, px, py) ? 1.0 : 0.0;
    }
  Image alpha = blur(region, s / 64.0);
  for (size_t i = 0; i < alpha.data.size(); ++i)
    alpha.data[i] = excluded.data[i] > 0 ? 0.0 : std::clamp(alpha.data[i], 0.0, 1.0);
  return alpha;
}

Image fuse(const Image& predicted, const Image& reference, const Image& alpha) {
  require(predicted.same_shape(reference) && alpha.channels == 1 &&
              alpha.height == predicted.height && alpha.width == predicted.width,
          ErrorCode::kShapeMismatch, "fuse needs equal face sizes and a matching mask");
  Image out = predicted;
  const size_t plane = static_cast<size_t>(alpha.height) * alpha.width;
  for (int c = 0; c < predicted.channels; ++c)
    for (size_t i = 0; i < plane; ++i) {
      const double a = alpha.data[i];
      out.data[c * plane + i] = predicted.data[c * plane + i] * a + reference.data[c * plane + i] * (1 - a);
    }
  return out;
}

nlohmann::json DubResult::to_json() const {
  return {{"frames", frames},
          {"reference_frame", reference_frame},
          {"faceless_frames", faceless_frames},
          {"hr_fallback_frames", hr_fallback_frames},
          {"fusion_fallback_frames", fusion_fallback_frames}};
}

DubResult dub(const fs::path& video, const fs::path& audio, const DubOptions& options,
              const fs::path& out) {
  const train::LoadedGenerator gen = train::load_generator(options.base_ckpt);
  std::optional<train::LoadedHrDecoder> hr;
  if (options.hr_ckpt) {
    hr = train::load_hr_decoder(*options.hr_ckpt);
    require(hr->profile == gen.profile, ErrorCode::kArchitectureMismatch,
            "HR checkpoint was trained for profile '" + hr->profile.name + "'");
  }
  const int s = gen.profile.face_size;
  const auto face_detector = face::make_face_detector(kDetectorId);
  const auto landmarks = face::make_landmark_detector(kDetectorId);

  media::FrameStream stream = media::extract_frames(video);
  media::Waveform wave = media::load_audio(audio);
  const media::MelSpectrogram mel = media::melspectrogram(wave);
  const int n = std::min(static_cast<int>(stream.frames.size()), mel.frame_count());
  require(n > 0, ErrorCode::kTooShort, "no overlap between video and audio");
  stream.frames.resize(n);
  wave.samples.resize(std::min(wave.samples.size(), static_cast<size_t>(n) * kSamplesPerFrame));

  const auto boxes = face::track_faces(stream.frames, *face_detector);
  DubResult result;
  result.frames = n;
  std::vector<Image> faces(n);
  std::vector<int> with_face;
  for (int i = 0; i < n; ++i) {
    if (!boxes[i]) {
      result.faceless_frames.push_back(i);
      continue;
    }
    faces[i] = face::crop_face(stream.frames[i], *boxes[i], s);
    with_face.push_back(i);
  }
  require(!with_face.empty(), ErrorCode::kNoFaceInVideo, "no face found in " + video.string());

  if (options.ref_frame) {
    const int k = *options.ref_frame;
    require(k >= 0 && k < n && boxes[k].has_value(), ErrorCode::kIndexOutOfRange,
            "reference frame " + std::to_string(k) + " is out of range or faceless");
    result.reference_frame = k;
  } else {
    std::vector<Image> candidates;
    for (int i : with_face) candidates.push_back(faces[i]);
    result.reference_frame = with_face[face::select_reference(candidates, {}, landmarks.get())];
  }
  const Image& ref = faces[result.reference_frame];

  nn::NoGradGuard no_grad;
  for (int i : with_face) {
    const Image refs[] = {ref};
    const Image masked[] = {face::mask_lower_half(faces[i])};
    const media::MelChunk chunk[] = {media::mel_window_for_frame(mel, i)};
    Image predicted =
        tensor_to_image(gen.net->forward(stack_images(refs), stack_images(masked),
                                         model::mel_batch(chunk)),
                        0);
    if (hr) {
      try {
        const face::LandmarkSet lm = landmarks->detect(predicted);
        Image sketch = hr->uses_sketch ? face::render_sketch(lm, s) : Image(1, s, s);
        const Image base[] = {predicted};
        const Image sk[] = {std::move(sketch)};
        predicted = tensor_to_image(hr->net->forward(stack_images(base), stack_images(sk)), 0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kLandmarkFailure) throw;
        result.hr_fallback_frames.push_back(i);
      }
    }
    if (options.fusion) {
      std::optional<Image> alpha;
      try {
        alpha = face_mask_alpha(predicted, landmarks->detect(predicted));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kLandmarkFailure) throw;
        result.fusion_fallback_frames.push_back(i);
      }
      stream.frames[i] = face::paste_back(stream.frames[i], predicted, *boxes[i],
                                          alpha ? &*alpha : nullptr);
    } else {
      stream.frames[i] = face::paste_back(stream.frames[i], predicted, *boxes[i]);
    }
  }

  media::write_video(stream, wave, out);
  nlohmann::json meta = result.to_json();
  meta["hr"] = hr.has_value();
  meta["fusion"] = options.fusion;
  meta["base_ckpt"] = options.base_ckpt.string();
  if (options.hr_ckpt) meta["hr_ckpt"] = options.hr_ckpt->string();
  fs::path meta_path = out;
  meta_path += ".meta.json";
  std::ofstream f(meta_path, std::ios::trunc);
  f << meta.dump(2) << '\n';
  require(f.good(), ErrorCode::kWriteFailure, "cannot write " + meta_path.string());
  return result;
}

}  // namespace hyperlips::pipeline
