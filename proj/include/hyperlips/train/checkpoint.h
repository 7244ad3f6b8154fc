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

#ifndef HYPERLIPS_TRAIN_CHECKPOINT_H_
#define HYPERLIPS_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "hyperlips/nn/module.h"

namespace hyperlips::train {

inline constexpr uint32_t kCheckpointFormatVersion = 1;

// Named-tensor archive shared by every stage. `kind` tags what the tensors
// belong to ("sync", "base", "hr", "stage2") so a file cannot be loaded into
// the wrong model.
struct Checkpoint {
  std::string kind;
  std::string profile;
  int64_t step = 0;
  std::string config_hash;
  nlohmann::json meta = nlohmann::json::object();
  nn::TensorMap tensors;
};

enum class TensorStorage { kFloat64, kFloat32 };

// Layout: "HLCK", u32 format version, u64 header length, JSON header,
// little-endian tensor payload, CRC-32 of everything before it. Written to
// a temporary file and renamed into place. Float64 storage round-trips
// bit-exactly; float32 is meant for bulky derived datasets.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path,
                     TensorStorage storage = TensorStorage::kFloat64);

// VersionMismatch for another format version, CorruptArchive for bad magic,
// truncation, CRC failure or malformed header.
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Additionally ArchitectureMismatch when the kind differs.
Checkpoint load_checkpoint(const std::filesystem::path& path, std::string_view expected_kind);

// Copies `prefix`-qualified entries into `module`; ArchitectureMismatch on
// missing names or shapes.
void load_module(nn::Module& module, const nn::TensorMap& tensors, std::string_view prefix);
void store_module(const nn::Module& module, nn::TensorMap& tensors, std::string_view prefix);
void store_state(const nn::TensorMap& state, nn::TensorMap& tensors, std::string_view prefix);
nn::TensorMap extract_prefixed(const nn::TensorMap& tensors, std::string_view prefix);

}  // namespace hyperlips::train

#endif  // HYPERLIPS_TRAIN_CHECKPOINT_H_
