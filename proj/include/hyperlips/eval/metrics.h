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

#ifndef HYPERLIPS_EVAL_METRICS_H_
#define HYPERLIPS_EVAL_METRICS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hyperlips/face/detector.h"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"
#include "json.hpp"

namespace hyperlips::eval {

inline constexpr double kPsnrCap = 100.0;
inline constexpr int kEvalCropSize = 160;

// 10 log10(1 / MSE) for images in [0, 1], capped at 100 dB.
double psnr(const Image& x, const Image& y);

// Mean SSIM over valid 11 x 11 Gaussian windows (sigma 1.5, K1 0.01,
// K2 0.03, data range 1), averaged over channels.
double ssim(const Image& x, const Image& y);

// Mean Euclidean distance between corresponding lip points of two sets in
// the same coordinates. LandmarkFailure if either set lacks lip points.
double lip_distance(const face::LandmarkSet& a, const face::LandmarkSet& b);

struct LmdResult {
  double distance = 0.0;
  int frames_used = 0;
  int frames_skipped = 0;
};

// Mean over frames of lip_distance in pixels. Frames where detection fails
// on either side are skipped; NoValidFrames if none remain.
LmdResult lmd(std::span<const Image> generated, std::span<const Image> truth,
              const face::LandmarkDetector& detector);

struct EvalReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double lmd = 0.0;
  double lse_c = 0.0;
  double lse_d = 0.0;
  int frames_used = 0;
  int frames_skipped = 0;
  // LMD of the truth video's reference face repeated for every frame.
  double baseline_lmd = 0.0;
  int reference_frame = 0;

  nlohmann::json to_json() const;
};

struct EvalOptions {
  std::filesystem::path sync_ckpt;
  // Reference for the freeze baseline; the closed-mouth frame otherwise.
  std::optional<int> reference_frame;
};

// Faces are detected independently in both videos and cropped to 160 x 160.
// Pixel and lip metrics use frames with a face in both; LSE scores the
// generated crops against `audio` with the sync expert.
EvalReport evaluate(const std::filesystem::path& generated, const std::filesystem::path& truth,
                    const std::filesystem::path& audio, const EvalOptions& options);

}  // namespace hyperlips::eval

#endif  // HYPERLIPS_EVAL_METRICS_H_
