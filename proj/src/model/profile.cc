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

#include "hyperlips/model/profile.h"

#include "hyperlips/error.h"

namespace hyperlips::model {

ModelProfile full_profile() {
  ModelProfile p;
  p.name = "full";
  p.face_size = 128;
  p.channels = {32, 64, 128, 256};
  p.audio_dim = 512;
  p.hyper_kernel = 1;
  p.sync_dim = 512;
  p.sync_channels = {32, 64, 128, 256};
  p.disc_channels = {32, 64, 128, 256};
  p.hr_width = 64;
  return p;
}

ModelProfile toy_profile() {
  ModelProfile p;
  p.name = "toy";
  p.face_size = 32;
  p.channels = {8, 16, 32, 64};
  p.audio_dim = 64;
  p.hyper_kernel = 1;
  p.sync_dim = 64;
  p.sync_channels = {16, 32, 64, 64};
  p.disc_channels = {8, 16, 32, 64};
  p.hr_width = 16;
  return p;
}

ModelProfile profile_by_name(std::string_view name) {
  if (name == "full") return full_profile();
  if (name == "toy") return toy_profile();
  fail(ErrorCode::kInvalidArgument, "unknown model profile '" + std::string(name) + "'");
}

}  // namespace hyperlips::model
