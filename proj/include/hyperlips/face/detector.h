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

#ifndef HYPERLIPS_FACE_DETECTOR_H_
#define HYPERLIPS_FACE_DETECTOR_H_

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hyperlips/face/face_ops.h"
#include "hyperlips/face/landmarks.h"
#include "hyperlips/image.h"

namespace hyperlips::face {

class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  // Largest face in the frame; throws NoFace.
  virtual FaceBox detect(const RgbFrame& frame) const = 0;
};

class LandmarkDetector {
 public:
  virtual ~LandmarkDetector() = default;
  // Landmarks in the coordinates of the square face crop; throws
  // LandmarkFailure.
  virtual LandmarkSet detect(const Image& face) const = 0;
};

// Detectors for the analytic toy faces. Both are stateless and reentrant.
class ToyFaceDetector final : public FaceDetector {
 public:
  FaceBox detect(const RgbFrame& frame) const override;
};

class ToyLandmarkDetector final : public LandmarkDetector {
 public:
  LandmarkSet detect(const Image& face) const override;
};

// Detects every frame, median-smooths the boxes over 5 frames and clamps
// them to the frame. Frames without a face stay empty.
std::vector<std::optional<FaceBox>> track_faces(std::span<const RgbFrame> frames,
                                                const FaceDetector& detector);

std::unique_ptr<FaceDetector> make_face_detector(std::string_view id);
std::unique_ptr<LandmarkDetector> make_landmark_detector(std::string_view id);

}  // namespace hyperlips::face

#endif  // HYPERLIPS_FACE_DETECTOR_H_
