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

#include "hyperlips/eval/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "hyperlips/error.h"
#include "hyperlips/face/face_ops.h"
#include "hyperlips/media/audio.h"
#include "hyperlips/media/mel.h"
#include "hyperlips/media/video.h"
#include "hyperlips/model/sync_expert.h"
#include "hyperlips/train/trainer.h"

namespace hyperlips::eval {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kDetectorId = "toyface-v1";
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void require_same(const Image& x, const Image& y) {
  require(x.same_shape(y) && !x.data.empty(), ErrorCode::kShapeMismatch,
          "metric needs two non-empty images of equal shape");
}

std::array<double, kWindow> ssim_kernel() {
  std::array<double, kWindow> k{};
  double total = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    total += k[i] = std::exp(-d * d / (2 * kSigma * kSigma));
  }
  for (double& v : k) v /= total;
  return k;
}

// Valid-mode separable filtering of one channel.
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w,
                                 const std::array<double, kWindow>& k) {
  const int oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> rows(static_cast<size_t>(h) * ow), out(static_cast<size_t>(oh) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * plane[static_cast<size_t>(y) * w + x + i];
      rows[static_cast<size_t>(y) * ow + x] = acc;
    }
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * rows[static_cast<size_t>(y + i) * ow + x];
      out[static_cast<size_t>(y) * ow + x] = acc;
    }
  return out;
}

double channel_ssim(std::span<const double> x, std::span<const double> y, int h, int w) {
  static const auto k = ssim_kernel();
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::vector<double> xx(xs.size()), yy(xs.size()), xy(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    xx[i] = xs[i] * xs[i];
    yy[i] = ys[i] * ys[i];
    xy[i] = xs[i] * ys[i];
  }
  const auto mx = filter_valid(xs, h, w, k), my = filter_valid(ys, h, w, k);
  const auto sxx = filter_valid(xx, h, w, k), syy = filter_valid(yy, h, w, k);
  const auto sxy = filter_valid(xy, h, w, k);
  double total = 0;
  for (size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2 * mx[i] * my[i] + kC1) * (2 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mx.size());
}

struct Track {
  std::vector<std::optional<face::FaceBox>> boxes;
  media::FrameStream stream;
};

Track track(const fs::path& video, const face::FaceDetector& detector) {
  Track t{{}, media::extract_frames(video)};
  t.boxes = face::track_faces(t.stream.frames, detector);
  return t;
}

}  // namespace

double psnr(const Image& x, const Image& y) {
  require_same(x, y);
  double sum = 0;
  for (size_t i = 0; i < x.data.size(); ++i) {
    const double d = x.data[i] - y.data[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(x.data.size());
  if (mse == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10 * std::log10(1 / mse));
}

double ssim(const Image& x, const Image& y) {
  require_same(x, y);
  require(x.height >= kWindow && x.width >= kWindow, ErrorCode::kShapeMismatch,
          "ssim needs images of at least 11 x 11");
  const size_t plane = static_cast<size_t>(x.height) * x.width;
  double total = 0;
  for (int c = 0; c < x.channels; ++c)
    total += channel_ssim(std::span(x.data).subspan(c * plane, plane),
                          std::span(y.data).subspan(c * plane, plane), x.height, x.width);
  return total / x.channels;
}

double lip_distance(const face::LandmarkSet& a, const face::LandmarkSet& b) {
  const auto pa = face::lip_points(a);
  const auto pb = face::lip_points(b);
  require(!pa.empty() && pa.size() == pb.size(), ErrorCode::kLandmarkFailure,
          "lip distance needs two complete lip contours");
  double total = 0;
  for (size_t i = 0; i < pa.size(); ++i) {
    require(!pa[i].missing() && !pb[i].missing(), ErrorCode::kLandmarkFailure,
            "lip point missing");
    total += std::hypot(pa[i].x - pb[i].x, pa[i].y - pb[i].y);
  }
  return total / static_cast<double>(pa.size());
}

LmdResult lmd(std::span<const Image> generated, std::span<const Image> truth,
              const face::LandmarkDetector& detector) {
  require(generated.size() == truth.size(), ErrorCode::kShapeMismatch,
          "lmd needs equal frame counts");
  LmdResult r;
  double total = 0;
  for (size_t i = 0; i < generated.size(); ++i) {
    try {
      total += lip_distance(detector.detect(generated[i]), detector.detect(truth[i]));
      ++r.frames_used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kLandmarkFailure) throw;
      ++r.frames_skipped;
    }
  }
  require(r.frames_used > 0, ErrorCode::kNoValidFrames, "no frame has landmarks on both sides");
  r.distance = total / r.frames_used;
  return r;
}

nlohmann::json EvalReport::to_json() const {
  return {{"psnr", psnr},
          {"ssim", ssim},
          {"lmd", lmd},
          {"lmd_units", "pixels at 160x160"},
          {"lse_c", lse_c},
          {"lse_d", lse_d},
          {"frames_used", frames_used},
          {"frames_skipped", frames_skipped},
          {"baseline_lmd", baseline_lmd},
          {"reference_frame", reference_frame}};
}

EvalReport evaluate(const fs::path& generated, const fs::path& truth, const fs::path& audio,
                    const EvalOptions& options) {
  const train::LoadedSyncExpert expert = train::load_sync_expert(options.sync_ckpt);
  const auto detector = face::make_face_detector(kDetectorId);
  const auto landmarks = face::make_landmark_detector(kDetectorId);
  const Track gen = track(generated, *detector);
  const Track gt = track(truth, *detector);
  const media::MelSpectrogram mel = media::melspectrogram(media::load_audio(audio));
  const int n = std::min({static_cast<int>(gen.stream.frames.size()),
                          static_cast<int>(gt.stream.frames.size()), mel.frame_count()});

  std::vector<Image> gen_crops, gt_crops;
  for (int i = 0; i < n; ++i) {
    if (!gen.boxes[i] || !gt.boxes[i]) continue;
    gen_crops.push_back(face::crop_face(gen.stream.frames[i], *gen.boxes[i], kEvalCropSize));
    gt_crops.push_back(face::crop_face(gt.stream.frames[i], *gt.boxes[i], kEvalCropSize));
  }
  require(!gen_crops.empty(), ErrorCode::kNoValidFrames, "no frame has a face in both videos");

  EvalReport report;
  for (size_t i = 0; i < gen_crops.size(); ++i) {
    report.psnr += psnr(gen_crops[i], gt_crops[i]);
    report.ssim += ssim(gen_crops[i], gt_crops[i]);
  }
  report.psnr /= static_cast<double>(gen_crops.size());
  report.ssim /= static_cast<double>(gen_crops.size());

  const LmdResult lip = lmd(gen_crops, gt_crops, *landmarks);
  report.lmd = lip.distance;
  report.frames_used = lip.frames_used;
  report.frames_skipped = n - lip.frames_used;

  report.reference_frame = face::select_reference(
      gt_crops, {.fixed_index = options.reference_frame}, landmarks.get());
  const std::vector<Image> frozen(gt_crops.size(), gt_crops[report.reference_frame]);
  report.baseline_lmd = lmd(frozen, gt_crops, *landmarks).distance;

  // The sync expert sees its own crop size over the frames with a face.
  const int s = expert.profile.face_size;
  std::vector<Image> sync_faces;
  int first = -1;
  for (int i = 0; i < n && (first < 0 || gen.boxes[i]); ++i) {
    if (!gen.boxes[i]) continue;
    if (first < 0) first = i;
    sync_faces.push_back(face::crop_face(gen.stream.frames[i], *gen.boxes[i], s));
  }
  const model::LseScores lse = model::lse_scores(*expert.net, sync_faces, mel, first);
  report.lse_c = lse.confidence;
  report.lse_d = lse.distance;
  return report;
}

}  // namespace hyperlips::eval
