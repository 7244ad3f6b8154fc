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

#ifndef HYPERLIPS_PIPELINE_DUBBING_H_
#define HYPERLIPS_PIPELINE_DUBBING_H_

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"

namespace hyperlips::pipeline {

// 1 x S x S blend weights: the convex hull of the landmarks minus the eye,
// brow and nose regions, feathered with a Gaussian of sigma S/64. The
// excluded regions are exactly zero. LandmarkFailure without landmarks.
Image face_mask_alpha(const Image& face, const face::LandmarkSet& landmarks);

// predicted * alpha + reference * (1 - alpha), per pixel and channel.
Image fuse(const Image& predicted, const Image& reference, const Image& alpha);

struct DubOptions {
  std::filesystem::path base_ckpt;
  std::optional<std::filesystem::path> hr_ckpt;
  // Reference frame index; the closed-mouth heuristic when empty.
  std::optional<int> ref_frame;
  bool fusion = true;
};

struct DubResult {
  int frames = 0;
  int reference_frame = 0;
  std::vector<int> faceless_frames;
  // Frames where the HR stage fell back to the base face.
  std::vector<int> hr_fallback_frames;
  // Frames pasted without fusion because the mask had no landmarks.
  std::vector<int> fusion_fallback_frames;

  nlohmann::json to_json() const;
};

// Regenerates the mouth of every frame of `video` from `audio` and writes
// the result to `out` together with `out`.meta.json. The output covers the
// shorter of the two inputs; pixels outside each face box are untouched.
// NoFaceInVideo when no frame contains a face.
DubResult dub(const std::filesystem::path& video, const std::filesystem::path& audio,
              const DubOptions& options, const std::filesystem::path& out);

}  // namespace hyperlips::pipeline

#endif  // HYPERLIPS_PIPELINE_DUBBING_H_
