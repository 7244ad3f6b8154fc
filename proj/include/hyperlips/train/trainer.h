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

#ifndef HYPERLIPS_TRAIN_TRAINER_H_
#define HYPERLIPS_TRAIN_TRAINER_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hyperlips/model/base_generator.h"
#include "hyperlips/model/hr_decoder.h"
#include "hyperlips/model/sync_expert.h"
#include "hyperlips/train/config.h"
#include "hyperlips/train/dataset.h"

namespace hyperlips::train {

inline constexpr std::string_view kSyncKind = "sync";
inline constexpr std::string_view kBaseKind = "base";
inline constexpr std::string_view kHrKind = "hr";
inline constexpr std::string_view kStage2Kind = "stage2";

// {ckpts/, logs/, samples/} under a run root, plus config.ini.
struct RunDir {
  std::filesystem::path root;

  std::filesystem::path ckpts() const { return root / "ckpts"; }
  std::filesystem::path logs() const { return root / "logs"; }
  std::filesystem::path samples() const { return root / "samples"; }
  std::filesystem::path latest() const { return ckpts() / "latest.hlck"; }
};

RunDir create_run_dir(const std::filesystem::path& root);

using LossRow = std::map<std::string, double>;
// Called after every step with the logged components.
using ProgressFn = std::function<void(int step, int total, const LossRow& row)>;

struct TrainReport {
  std::filesystem::path checkpoint;
  // One row per step with every logged loss component.
  std::vector<LossRow> history;
};

// Expert training on matched (aligned) and mismatched (shifted by >= 10
// frames within the clip) window/chunk pairs with BCE on the cosine.
TrainReport train_sync(const TrainConfig& config, const DatasetIndex& data, const RunDir& run,
                       const ProgressFn& progress = {});

// Stage-1 GAN training with 1:1 discriminator/generator updates against a
// frozen sync expert. MissingSyncExpert when `sync_ckpt` cannot be loaded.
TrainReport train_base(const TrainConfig& config, const DatasetIndex& data,
                       const std::filesystem::path& sync_ckpt, const RunDir& run,
                       const ProgressFn& progress = {});

struct Stage2Report {
  std::filesystem::path archive;
  int samples = 0;
  int skipped = 0;
};

// Runs the stage-1 generator over every frame, detects a sketch on each
// generated face and pairs it with the ground truth crop at
// face_size * scale. Frames whose landmark detection fails are skipped and
// listed in skipped.csv.
Stage2Report build_stage2_dataset(const std::filesystem::path& base_ckpt, const DatasetIndex& data,
                                  const std::filesystem::path& out_dir, int scale, uint64_t seed);

// Stage-2 training on a build_stage2_dataset directory. EmptyDataset when it
// holds no samples.
TrainReport train_hr(const TrainConfig& config, const std::filesystem::path& stage2_dir,
                     const RunDir& run, const ProgressFn& progress = {});

struct LoadedGenerator {
  model::ModelProfile profile;
  std::unique_ptr<model::BaseGenerator> net;
};

struct LoadedSyncExpert {
  model::ModelProfile profile;
  std::unique_ptr<model::SyncExpert> net;
};

struct LoadedHrDecoder {
  model::ModelProfile profile;
  int scale = 1;
  bool uses_sketch = true;
  std::unique_ptr<model::HrDecoder> net;
};

LoadedGenerator load_generator(const std::filesystem::path& path);
LoadedSyncExpert load_sync_expert(const std::filesystem::path& path);
LoadedHrDecoder load_hr_decoder(const std::filesystem::path& path);

// Mean absolute error of an HR checkpoint over a stage-2 dataset. Models
// trained without sketches are fed zeros in their place, as in training.
double hr_reconstruction_l1(const std::filesystem::path& hr_ckpt,
                            const std::filesystem::path& stage2_dir);

}  // namespace hyperlips::train

#endif  // HYPERLIPS_TRAIN_TRAINER_H_
