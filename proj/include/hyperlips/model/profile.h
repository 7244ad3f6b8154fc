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

#ifndef HYPERLIPS_MODEL_PROFILE_H_
#define HYPERLIPS_MODEL_PROFILE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hyperlips::model {

inline constexpr int kPyramidLevels = 4;
inline constexpr int kSyncFrames = 5;
inline constexpr int kMelSteps = 16;
inline constexpr int kMelBins = 80;

// Architecture sizes. Parameter counts are a pure function of the profile.
struct ModelProfile {
  std::string name;
  int face_size = 0;
  std::array<int64_t, kPyramidLevels> channels{};
  int64_t audio_dim = 0;
  int hyper_kernel = 1;
  int64_t sync_dim = 0;
  std::array<int64_t, 4> sync_channels{};
  std::array<int64_t, 4> disc_channels{};
  int64_t hr_width = 0;

  bool operator==(const ModelProfile&) const = default;
};

ModelProfile full_profile();
ModelProfile toy_profile();
// "full" or "toy"; InvalidArgument otherwise.
ModelProfile profile_by_name(std::string_view name);

}  // namespace hyperlips::model

#endif  // HYPERLIPS_MODEL_PROFILE_H_
