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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include "hyperlips/error.h"
#include "hyperlips/face/detector.h"
#include "hyperlips/train/checkpoint.h"
#include "hyperlips/train/config.h"
#include "hyperlips/train/dataset.h"
#include "hyperlips/train/toy_dataset.h"
#include "hyperlips/train/trainer.h"
#include "test_util.h"

namespace hyperlips::train {
namespace {

namespace fs = std::filesystem;
using hyperlips::testing::expect_error;
using hyperlips::testing::TempDir;

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << bytes;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> values(const nn::Tensor& t) { return {t.data().begin(), t.data().end()}; }

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.kind = "base";
  c.profile = "toy";
  c.step = 42;
  c.config_hash = "deadbeef";
  c.meta = {{"note", "x"}, {"scale", 2}};
  c.tensors.emplace("a.weight", nn::Tensor({2, 3}, {1.0, -2.5, 1e-300, 3.25, 0.1, -0.0}));
  c.tensors.emplace("b", nn::Tensor({1}, {M_PI}));
  return c;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  TempDir dir;
  const fs::path p = dir.path() / "c.hlck";
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(c, p);
  const Checkpoint back = load_checkpoint(p, "base");
  EXPECT_EQ(back.kind, c.kind);
  EXPECT_EQ(back.profile, c.profile);
  EXPECT_EQ(back.step, c.step);
  EXPECT_EQ(back.config_hash, c.config_hash);
  EXPECT_EQ(back.meta, c.meta);
  ASSERT_EQ(back.tensors.size(), c.tensors.size());
  for (const auto& [name, t] : c.tensors) {
    EXPECT_EQ(back.tensors.at(name).shape(), t.shape());
    EXPECT_EQ(values(back.tensors.at(name)), values(t));
  }
}

TEST(Checkpoint, Float32StorageRoundsValues) {
  TempDir dir;
  const fs::path p = dir.path() / "c.hlck";
  save_checkpoint(sample_checkpoint(), p, TensorStorage::kFloat32);
  const Checkpoint back = load_checkpoint(p);
  EXPECT_EQ(back.tensors.at("b").data()[0], static_cast<double>(static_cast<float>(M_PI)));
}

TEST(Checkpoint, FormatErrors) {
  TempDir dir;
  const fs::path p = dir.path() / "c.hlck";
  save_checkpoint(sample_checkpoint(), p);
  const std::string good = read_bytes(p);

  std::string version = good;
  version[4] = 7;
  write_bytes(p, version);
  expect_error(ErrorCode::kVersionMismatch, [&] { load_checkpoint(p); });

  write_bytes(p, good.substr(0, good.size() / 2));
  expect_error(ErrorCode::kCorruptArchive, [&] { load_checkpoint(p); });

  std::string flipped = good;
  flipped[good.size() - 10] ^= 0x40;
  write_bytes(p, flipped);
  expect_error(ErrorCode::kCorruptArchive, [&] { load_checkpoint(p); });

  write_bytes(p, "JUNK" + good.substr(4));
  expect_error(ErrorCode::kCorruptArchive, [&] { load_checkpoint(p); });

  write_bytes(p, good);
  expect_error(ErrorCode::kArchitectureMismatch, [&] { load_checkpoint(p, "hr"); });
}

TEST(Config, ParseOverrideAndHash) {
  Config c = Config::parse("[train]\nsteps = 50\nlearning_rate = 0.001\n[hr]\nzero_sketch = true\n");
  EXPECT_EQ(c.get_int("train.steps", 0), 50);
  EXPECT_DOUBLE_EQ(c.get_double("train.learning_rate", 0), 1e-3);
  EXPECT_TRUE(c.get_bool("hr.zero_sketch", false));
  EXPECT_EQ(c.get_int("train.batch_size", 9), 9);

  const std::string before = c.hash();
  EXPECT_EQ(before.size(), 8u);
  c.set("train.steps", "60");
  EXPECT_NE(c.hash(), before);
  EXPECT_EQ(Config::parse(c.to_ini()).values(), c.values());

  expect_error(ErrorCode::kInvalidArgument, [&] { c.set("steps", "1"); });
  c.set("train.steps", "many");
  expect_error(ErrorCode::kInvalidArgument, [&] { c.get_int("train.steps", 0); });
}

TEST(Config, TrainConfigDefaultsAndValidation) {
  const TrainConfig d = train_config_from(Config{});
  EXPECT_EQ(d.steps, 2000);
  EXPECT_DOUBLE_EQ(d.learning_rate, 1e-4);
  EXPECT_EQ(d.effective_batch(), 4);
  EXPECT_DOUBLE_EQ(d.weights.base.sync, 0.3);

  const TrainConfig round = train_config_from(resolved_config(d));
  EXPECT_EQ(resolved_config(round).to_ini(), resolved_config(d).to_ini());

  Config bad;
  bad.set("train.learning_rate", "-1");
  expect_error(ErrorCode::kInvalidArgument, [&] { train_config_from(bad); });
  Config scale;
  scale.set("hr.scale", "3");
  expect_error(ErrorCode::kInvalidArgument, [&] { train_config_from(scale); });
}

TEST(ToyData, OpeningTracksAudioLoudness) {
  Rng rng(5);
  const ToyClip clip = synthesize_toy_clip({}, rng);
  ASSERT_EQ(clip.frames.size(), 50u);
  const auto rms = frame_rms(clip.audio, 50);
  EXPECT_GT(pearson(rms, clip.openings), 0.9);
  EXPECT_GT(pearson(clip.openings, clip.mouth_heights), 0.9);
  for (double o : clip.openings) {
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
  }
}

TEST(ToyData, SilentClipKeepsMouthClosed) {
  Rng rng(6);
  const ToyClip clip = synthesize_toy_clip({.silent = true}, rng);
  for (double o : clip.openings) EXPECT_EQ(o, 0.0);
  for (double h : clip.mouth_heights) EXPECT_NEAR(h, clip.mouth_heights.front(), 1e-9);
}

TEST(ToyData, DatasetIsDeterministicAndLoadable) {
  TempDir a, b;
  const ToyDatasetOptions options{.clips = 2, .seed = 11, .clip = {.frame_size = 96, .duration = 0.6}};
  make_toy_dataset(options, a.path());
  make_toy_dataset(options, b.path());
  for (const char* f : {"clip_000.hlv", "clip_001.wav", "clip_001.json", "dataset.json"})
    EXPECT_EQ(read_bytes(a.path() / f), read_bytes(b.path() / f)) << f;

  const DatasetIndex index = load_dataset(a.path());
  ASSERT_EQ(index.clips.size(), 2u);
  const ClipTruth truth = load_clip_truth(index.truth(index.clips[0]));
  EXPECT_EQ(truth.openings.size(), 15u);
  const auto detector = face::make_face_detector("toyface-v1");
  const PreparedClip clip = prepare_clip(index.clips[0], index.video(index.clips[0]),
                                         index.audio(index.clips[0]), 64, *detector);
  EXPECT_EQ(clip.size(), 15);
  EXPECT_EQ(clip.chunks.size(), 15u);
}

TEST(ToyData, MissingIndexIsEmptyDataset) {
  TempDir dir;
  expect_error(ErrorCode::kEmptyDataset, [&] { load_dataset(dir.path()); });
}

// One small dataset shared by the trainer tests.
class Trainers : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new TempDir;
    make_toy_dataset({.clips = 2, .seed = 3, .clip = {.frame_size = 96, .duration = 1.2}},
                     data_->path());
  }
  static void TearDownTestSuite() {
    delete data_;
    data_ = nullptr;
  }

  static TrainConfig config(int steps) {
    TrainConfig c;
    c.steps = steps;
    c.checkpoint_every = 0;
    return c;
  }

  static TempDir* data_;
  TempDir work_;
};

TempDir* Trainers::data_ = nullptr;

TEST_F(Trainers, ZeroStepRunsWriteCheckpoints) {
  const DatasetIndex data = load_dataset(data_->path());
  const auto sync = train_sync(config(0), data, create_run_dir(work_.path() / "sync"));
  EXPECT_TRUE(fs::exists(sync.checkpoint));
  EXPECT_TRUE(sync.history.empty());
  EXPECT_TRUE(fs::exists(work_.path() / "sync" / "config.ini"));
  const auto base =
      train_base(config(0), data, sync.checkpoint, create_run_dir(work_.path() / "base"));
  EXPECT_EQ(load_checkpoint(base.checkpoint).kind, kBaseKind);
}

TEST_F(Trainers, BaseNeedsSyncExpert) {
  const DatasetIndex data = load_dataset(data_->path());
  expect_error(ErrorCode::kMissingSyncExpert, [&] {
    train_base(config(1), data, work_.path() / "missing.hlck", create_run_dir(work_.path() / "b"));
  });
}

TEST_F(Trainers, SeededRunsAreIdenticalAndLogged) {
  const DatasetIndex data = load_dataset(data_->path());
  const auto sync = train_sync(config(3), data, create_run_dir(work_.path() / "sync"));
  ASSERT_EQ(sync.history.size(), 3u);
  for (const char* col : {"bce", "matched_cos", "mismatched_cos"})
    EXPECT_TRUE(sync.history[0].contains(col)) << col;

  const std::string expert_before = read_bytes(sync.checkpoint);
  const auto a = train_base(config(3), data, sync.checkpoint, create_run_dir(work_.path() / "a"));
  const auto b = train_base(config(3), data, sync.checkpoint, create_run_dir(work_.path() / "b"));
  EXPECT_EQ(read_bytes(sync.checkpoint), expert_before);
  const Checkpoint ca = load_checkpoint(a.checkpoint);
  const Checkpoint cb = load_checkpoint(b.checkpoint);
  ASSERT_EQ(ca.tensors.size(), cb.tensors.size());
  for (const auto& [name, t] : ca.tensors) EXPECT_EQ(values(t), values(cb.tensors.at(name))) << name;
  for (const char* col : {"total", "adversarial", "reconstruction", "lpips", "sync", "disc"})
    EXPECT_TRUE(a.history[0].contains(col)) << col;
  EXPECT_TRUE(fs::exists(work_.path() / "a" / "logs" / "train_base.csv"));
}

TEST_F(Trainers, Stage2AndHrRoundTrip) {
  const DatasetIndex data = load_dataset(data_->path());
  const auto sync = train_sync(config(0), data, create_run_dir(work_.path() / "sync"));
  const auto base =
      train_base(config(0), data, sync.checkpoint, create_run_dir(work_.path() / "base"));
  const fs::path s2 = work_.path() / "s2";
  const Stage2Report report = build_stage2_dataset(base.checkpoint, data, s2, 2, 0);
  EXPECT_EQ(report.samples + report.skipped, 60);
  EXPECT_TRUE(fs::exists(s2 / "samples.csv"));
  EXPECT_TRUE(fs::exists(s2 / "skipped.csv"));
  const Checkpoint archive = load_checkpoint(report.archive, kStage2Kind);
  EXPECT_EQ(archive.tensors.at("gt").dim(2), 2 * model::toy_profile().face_size);

  TrainConfig hr = config(2);
  const auto trained = train_hr(hr, s2, create_run_dir(work_.path() / "hr"));
  EXPECT_EQ(trained.history.size(), 2u);
  const LoadedHrDecoder dec = load_hr_decoder(trained.checkpoint);
  EXPECT_EQ(dec.scale, 2);
  EXPECT_TRUE(dec.uses_sketch);
  const double l1 = hr_reconstruction_l1(trained.checkpoint, s2);
  EXPECT_TRUE(std::isfinite(l1));
  EXPECT_GT(l1, 0.0);

  // Stage-2 archives cannot stand in for model checkpoints.
  expect_error(ErrorCode::kArchitectureMismatch, [&] { load_generator(report.archive); });
}

}  // namespace
}  // namespace hyperlips::train
