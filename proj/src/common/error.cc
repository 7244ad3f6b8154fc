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

#include "hyperlips/error.h"

namespace hyperlips {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreadableMedia: return "UnreadableMedia";
    case ErrorCode::kNoAudioTrack: return "NoAudioTrack";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kWriteFailure: return "WriteFailure";
    case ErrorCode::kDurationMismatch: return "DurationMismatch";
    case ErrorCode::kNoFace: return "NoFace";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kLandmarkFailure: return "LandmarkFailure";
    case ErrorCode::kMissingLipLandmarks: return "MissingLipLandmarks";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kWeightShapeMismatch: return "WeightShapeMismatch";
    case ErrorCode::kNotEnoughFrames: return "NotEnoughFrames";
    case ErrorCode::kNoSyncModel: return "NoSyncModel";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kExtractorUnavailable: return "ExtractorUnavailable";
    case ErrorCode::kEmptyLipRegion: return "EmptyLipRegion";
    case ErrorCode::kMissingSyncExpert: return "MissingSyncExpert";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptArchive: return "CorruptArchive";
    case ErrorCode::kArchitectureMismatch: return "ArchitectureMismatch";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kNoFaceInVideo: return "NoFaceInVideo";
    case ErrorCode::kNoValidFrames: return "NoValidFrames";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOutputExists: return "OutputExists";
  }
  return "Unknown";
}

}  // namespace hyperlips
