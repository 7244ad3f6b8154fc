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

#include "hyperlips/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include "hyperlips/error.h"
#include "hyperlips/face/detector.h"
#include "hyperlips/loss/losses.h"
#include "hyperlips/model/discriminator.h"
#include "hyperlips/model/inputs.h"
#include "hyperlips/nn/adam.h"
#include "hyperlips/nn/ops.h"
#include "hyperlips/train/checkpoint.h"

namespace hyperlips::train {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kDetectorId = "toyface-v1";
constexpr int kMinMismatchShift = 10;
constexpr int kInferenceBatch = 16;

// Appends loss rows to a CSV file whose columns are fixed by the first row.
class CsvLog {
 public:
  explicit CsvLog(const fs::path& path) : out_(path, std::ios::trunc) {
    require(out_.good(), ErrorCode::kWriteFailure, "cannot write " + path.string());
  }

  void append(const LossRow& row) {
    if (columns_.empty()) {
      for (const auto& [k, v] : row) columns_.push_back(k);
      for (size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
      out_ << '\n';
    }
    for (size_t i = 0; i < columns_.size(); ++i) {
      out_ << (i ? "," : "");
      if (columns_[i] == "step")
        out_ << static_cast<int64_t>(row.at("step"));
      else
        out_ << row.at(columns_[i]);
    }
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::vector<std::string> columns_;
};

void write_snapshot(const RunDir& run, const TrainConfig& config, const Config& extra) {
  Config snapshot = resolved_config(config);
  for (const auto& [k, v] : extra.values()) snapshot.set(k, v);
  snapshot.save(run.root / "config.ini");
}

void save_run_checkpoint(const RunDir& run, Checkpoint ckpt, int step, bool final) {
  if (final) {
    save_checkpoint(ckpt, run.latest());
    return;
  }
  char name[32];
  std::snprintf(name, sizeof name, "step_%06d.hlck", step);
  save_checkpoint(ckpt, run.ckpts() / name);
}

std::vector<PreparedClip> load_clips(const DatasetIndex& data, int crop_size, int min_frames) {
  const auto detector = face::make_face_detector(kDetectorId);
  std::vector<PreparedClip> clips;
  for (auto& c : prepare_dataset(data, crop_size, *detector))
    if (c.size() >= min_frames) clips.push_back(std::move(c));
  require(!clips.empty(), ErrorCode::kEmptyDataset,
          "no clip in " + data.root.string() + " has " + std::to_string(min_frames) + " frames");
  return clips;
}

nn::Tensor chunk_batch(const std::vector<media::MelChunk>& chunks) { return model::mel_batch(chunks); }

// Rows `index` of an [M, ...] tensor as a new constant batch.
nn::Tensor gather_rows(const nn::Tensor& src, std::span<const int64_t> index) {
  nn::Shape shape = src.shape();
  const int64_t row = src.numel() / shape[0];
  shape[0] = static_cast<int64_t>(index.size());
  nn::Tensor out(shape);
  auto d = out.data();
  for (size_t i = 0; i < index.size(); ++i)
    std::copy_n(src.data().begin() + index[i] * row, row, d.begin() + static_cast<int64_t>(i) * row);
  return out;
}

double mean_of(const nn::Tensor& t) {
  double s = 0;
  for (double v : t.data()) s += v;
  return s / static_cast<double>(t.numel());
}

int random_other_frame(const PreparedClip& clip, int target, Rng& rng) {
  face::ReferenceOptions options;
  options.policy = face::ReferencePolicy::kRandom;
  options.seed = rng.next_u64();
  options.target_index = target;
  return face::select_reference(clip.faces, options);
}

}  // namespace

RunDir create_run_dir(const fs::path& root) {
  RunDir run{root};
  std::error_code ec;
  for (const auto& d : {run.ckpts(), run.logs(), run.samples()}) {
    fs::create_directories(d, ec);
    require(!ec, ErrorCode::kWriteFailure, "cannot create " + d.string());
  }
  return run;
}

TrainReport train_sync(const TrainConfig& config, const DatasetIndex& data, const RunDir& run,
                       const ProgressFn& progress) {
  const model::ModelProfile profile = model::profile_by_name(config.profile);
  const auto clips = load_clips(data, profile.face_size, model::kSyncFrames + 2 * kMinMismatchShift);
  Config extra;
  extra.set("run.stage", "sync");
  extra.set("run.dataset", data.root.string());
  write_snapshot(run, config, extra);
  const std::string config_hash = resolved_config(config).hash();

  Rng init(config.seed);
  model::SyncExpert expert(profile, init);
  nn::Adam opt(expert.named_parameters(), {.lr = config.learning_rate});
  Rng sampler = Rng(config.seed).fork(1);
  CsvLog log(run.logs() / "train_sync.csv");
  TrainReport report;

  const auto checkpoint = [&](int step) {
    Checkpoint ckpt{std::string(kSyncKind), profile.name, step, config_hash, {}, {}};
    store_module(expert, ckpt.tensors, "sync.");
    store_state(opt.state(), ckpt.tensors, "opt.");
    return ckpt;
  };

  const int batch = config.effective_batch();
  for (int step = 1; step <= config.steps; ++step) {
    std::vector<Image> frames;
    std::vector<media::MelChunk> matched, mismatched;
    for (int b = 0; b < batch; ++b) {
      const auto& clip = clips[sampler.randint(0, static_cast<int64_t>(clips.size()))];
      const int windows = clip.size() - model::kSyncFrames + 1;
      const int j = static_cast<int>(sampler.randint(0, windows));
      int k = j;
      while (std::abs(k - j) < kMinMismatchShift) k = static_cast<int>(sampler.randint(0, windows));
      for (int f = 0; f < model::kSyncFrames; ++f) frames.push_back(clip.faces[j + f]);
      matched.push_back(clip.chunks[j]);
      mismatched.push_back(clip.chunks[k]);
    }
    expert.zero_grad();
    const nn::Tensor video = expert.embed_video(model::sync_window(stack_images(frames)));
    const nn::Tensor pos = nn::rowwise_dot(expert.embed_audio(chunk_batch(matched)), video);
    const nn::Tensor neg = nn::rowwise_dot(expert.embed_audio(chunk_batch(mismatched)), video);
    const auto clamped = [](const nn::Tensor& c) {
      return nn::clamp(c, loss::kLogClamp, 1.0 - loss::kLogClamp);
    };
    nn::Tensor bce =
        (nn::mean(nn::log(clamped(pos))) + nn::mean(nn::log(nn::add_scalar(clamped(neg) * -1.0, 1.0)))) *
        -0.5;
    bce.backward();
    opt.step();

    LossRow row{{"step", step},
                {"bce", bce.item()},
                {"matched_cos", mean_of(pos)},
                {"mismatched_cos", mean_of(neg)}};
    log.append(row);
    report.history.push_back(row);
    if (progress) progress(step, config.steps, row);
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0 && step < config.steps)
      save_run_checkpoint(run, checkpoint(step), step, false);
  }
  save_run_checkpoint(run, checkpoint(config.steps), config.steps, true);
  report.checkpoint = run.latest();
  return report;
}

TrainReport train_base(const TrainConfig& config, const DatasetIndex& data,
                       const fs::path& sync_ckpt, const RunDir& run, const ProgressFn& progress) {
  const model::ModelProfile profile = model::profile_by_name(config.profile);
  std::optional<LoadedSyncExpert> expert;
  try {
    expert = load_sync_expert(sync_ckpt);
  } catch (const Error& e) {
    fail(ErrorCode::kMissingSyncExpert, "cannot load sync expert: " + std::string(e.what()));
  }
  require(expert->profile == profile, ErrorCode::kArchitectureMismatch,
          "sync expert was trained for profile '" + expert->profile.name + "'");
  expert->net->set_trainable(false);
  const auto clips = load_clips(data, profile.face_size, model::kSyncFrames + 1);
  const auto extractor = loss::make_extractor(config.extractor);
  Config extra;
  extra.set("run.stage", "base");
  extra.set("run.dataset", data.root.string());
  extra.set("run.sync_ckpt", sync_ckpt.string());
  write_snapshot(run, config, extra);
  const std::string config_hash = resolved_config(config).hash();

  Rng init(config.seed);
  model::BaseGenerator gen(profile, init);
  model::QualityDiscriminator disc(profile.face_size, profile.disc_channels, true, init);
  nn::Adam opt_g(gen.named_parameters(), {.lr = config.learning_rate});
  nn::Adam opt_d(disc.named_parameters(), {.lr = config.learning_rate});
  Rng sampler = Rng(config.seed).fork(1);
  CsvLog log(run.logs() / "train_base.csv");
  TrainReport report;

  const auto checkpoint = [&](int step) {
    Checkpoint ckpt{std::string(kBaseKind), profile.name, step, config_hash, {}, {}};
    store_module(gen, ckpt.tensors, "gen.");
    store_module(disc, ckpt.tensors, "disc.");
    store_state(opt_g.state(), ckpt.tensors, "opt_g.");
    store_state(opt_d.state(), ckpt.tensors, "opt_d.");
    return ckpt;
  };

  const int batch = config.effective_batch();
  loss::BaseLossWeights warmup{};
  warmup.adversarial = warmup.lpips = warmup.sync = 0.0;
  warmup.reconstruction = config.weights.base.reconstruction;
  for (int step = 1; step <= config.steps; ++step) {
    const auto& w = step <= config.warmup_steps ? warmup : config.weights.base;
    std::vector<Image> gt_faces, refs;
    std::vector<media::MelChunk> chunks, window_chunks;
    for (int b = 0; b < batch; ++b) {
      const auto& clip = clips[sampler.randint(0, static_cast<int64_t>(clips.size()))];
      const int j = static_cast<int>(sampler.randint(0, clip.size() - model::kSyncFrames + 1));
      for (int f = j; f < j + model::kSyncFrames; ++f) {
        gt_faces.push_back(clip.faces[f]);
        refs.push_back(clip.faces[random_other_frame(clip, f, sampler)]);
        chunks.push_back(clip.chunks[f]);
      }
      window_chunks.push_back(clip.chunks[j]);
    }
    const nn::Tensor gt = stack_images(gt_faces);
    const nn::Tensor fake =
        gen.forward(stack_images(refs), model::lower_half_masked(gt), chunk_batch(chunks));

    disc.set_trainable(true);
    disc.zero_grad();
    nn::Tensor d_loss = loss::disc_loss(disc.forward(gt), disc.forward(fake.detach()));
    d_loss.backward();
    opt_d.step();

    disc.set_trainable(false);
    gen.zero_grad();
    loss::BaseLossTerms terms;
    terms.adversarial = loss::adv_loss(disc.forward(fake));
    terms.reconstruction = loss::recon_l1(fake, gt);
    terms.lpips = loss::lpips_loss(fake, gt, *extractor);
    {
      const nn::Tensor audio = expert->net->embed_audio(chunk_batch(window_chunks));
      terms.sync = loss::sync_loss(audio, expert->net->embed_video(model::sync_window(fake)));
    }
    nn::Tensor total = loss::total_base(terms, w);
    total.backward();
    opt_g.step();

    LossRow row{{"step", step},
                {"total", total.item()},
                {"adversarial", terms.adversarial.item()},
                {"reconstruction", terms.reconstruction.item()},
                {"lpips", terms.lpips.item()},
                {"sync", terms.sync.item()},
                {"disc", d_loss.item()}};
    log.append(row);
    report.history.push_back(row);
    if (progress) progress(step, config.steps, row);
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0 && step < config.steps)
      save_run_checkpoint(run, checkpoint(step), step, false);
  }
  disc.set_trainable(true);
  save_run_checkpoint(run, checkpoint(config.steps), config.steps, true);
  report.checkpoint = run.latest();
  return report;
}

Stage2Report build_stage2_dataset(const fs::path& base_ckpt, const DatasetIndex& data,
                                  const fs::path& out_dir, int scale, uint64_t seed) {
  require(scale == 1 || scale == 2 || scale == 4, ErrorCode::kInvalidArgument,
          "stage-2 scale must be 1, 2 or 4");
  const LoadedGenerator gen = load_generator(base_ckpt);
  const int s = gen.profile.face_size, hs = s * scale;
  const auto face_detector = face::make_face_detector(kDetectorId);
  const auto landmarks = face::make_landmark_detector(kDetectorId);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, ErrorCode::kWriteFailure, "cannot create " + out_dir.string());

  std::vector<Image> bases, sketches, gts;
  std::vector<face::LandmarkSet> gt_landmarks;
  nlohmann::json sample_ids = nlohmann::json::array();
  std::ofstream skipped(out_dir / "skipped.csv", std::ios::trunc);
  std::ofstream listed(out_dir / "samples.csv", std::ios::trunc);
  require(skipped.good() && listed.good(), ErrorCode::kWriteFailure,
          "cannot write stage-2 logs in " + out_dir.string());
  skipped << "clip,frame,reason\n";
  listed << "index,clip,frame\n";
  Stage2Report report;

  Rng rng(seed);
  nn::NoGradGuard no_grad;
  for (const auto& name : data.clips) {
    const PreparedClip clip =
        prepare_clip(name, data.video(name), data.audio(name), s, *face_detector);
    for (int start = 0; start < clip.size(); start += kInferenceBatch) {
      const int end = std::min(clip.size(), start + kInferenceBatch);
      std::vector<Image> refs, targets;
      std::vector<media::MelChunk> chunks;
      for (int f = start; f < end; ++f) {
        const int ref = clip.size() > 1 ? random_other_frame(clip, f, rng) : f;
        refs.push_back(clip.faces[ref]);
        targets.push_back(clip.faces[f]);
        chunks.push_back(clip.chunks[f]);
      }
      const nn::Tensor out =
          gen.net->forward(stack_images(refs), model::lower_half_masked(stack_images(targets)),
                           chunk_batch(chunks));
      for (int f = start; f < end; ++f) {
        const Image base = tensor_to_image(out, f - start);
        const auto skip = [&](const char* reason) {
          skipped << name << ',' << f << ',' << reason << '\n';
          ++report.skipped;
        };
        face::LandmarkSet base_lm, gt_lm;
        try {
          base_lm = landmarks->detect(base);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kLandmarkFailure) throw;
          skip("base_landmarks");
          continue;
        }
        Image gt = face::crop_face(clip.frames[f], clip.boxes[f], hs);
        try {
          gt_lm = landmarks->detect(gt);
          face::lip_region(gt_lm, hs);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kLandmarkFailure &&
              e.code() != ErrorCode::kMissingLipLandmarks)
            throw;
          skip("gt_landmarks");
          continue;
        }
        listed << bases.size() << ',' << name << ',' << f << '\n';
        sample_ids.push_back({name, f});
        bases.push_back(base);
        sketches.push_back(face::render_sketch(base_lm, s));
        gts.push_back(std::move(gt));
        gt_landmarks.push_back(std::move(gt_lm));
      }
    }
  }
  report.samples = static_cast<int>(bases.size());
  require(skipped.good() && listed.good(), ErrorCode::kWriteFailure, "short write of stage-2 logs");

  Checkpoint archive{std::string(kStage2Kind), gen.profile.name, 0, "", {}, {}};
  archive.meta = {{"scale", scale},
                  {"samples", report.samples},
                  {"skipped", report.skipped},
                  {"base_ckpt", base_ckpt.string()},
                  {"ids", sample_ids}};
  if (report.samples > 0) {
    archive.tensors["base"] = stack_images(bases);
    archive.tensors["sketch"] = stack_images(sketches);
    archive.tensors["gt"] = stack_images(gts);
    const auto points = static_cast<int64_t>(gt_landmarks.front().points.size());
    nn::Tensor lm({report.samples, points, 2});
    for (int i = 0; i < report.samples; ++i)
      for (int64_t p = 0; p < points; ++p) {
        lm.data()[(i * points + p) * 2] = gt_landmarks[i].points[p].x;
        lm.data()[(i * points + p) * 2 + 1] = gt_landmarks[i].points[p].y;
      }
    archive.tensors["gt_landmarks"] = lm;
  }
  report.archive = out_dir / "stage2.hlck";
  save_checkpoint(archive, report.archive, TensorStorage::kFloat32);
  return report;
}

namespace {

struct Stage2Data {
  model::ModelProfile profile;
  int scale = 1;
  nn::Tensor base, sketch, gt;
  std::vector<face::LipRegion> regions;

  int64_t size() const { return base.dim(0); }
};

Stage2Data load_stage2(const fs::path& dir) {
  Checkpoint archive = load_checkpoint(dir / "stage2.hlck", kStage2Kind);
  require(archive.meta.value("samples", 0) > 0, ErrorCode::kEmptyDataset,
          dir.string() + " holds no stage-2 samples");
  Stage2Data data;
  data.profile = model::profile_by_name(archive.profile);
  data.scale = archive.meta.at("scale").get<int>();
  data.base = archive.tensors.at("base");
  data.sketch = archive.tensors.at("sketch");
  data.gt = archive.tensors.at("gt");
  const nn::Tensor& lm = archive.tensors.at("gt_landmarks");
  const int hs = static_cast<int>(data.gt.dim(2));
  for (int64_t i = 0; i < lm.dim(0); ++i) {
    face::LandmarkSet set;
    set.image_size = hs;
    for (int64_t p = 0; p < lm.dim(1); ++p)
      set.points.push_back({lm.data()[(i * lm.dim(1) + p) * 2], lm.data()[(i * lm.dim(1) + p) * 2 + 1]});
    data.regions.push_back(face::lip_region(set, hs));
  }
  return data;
}

}  // namespace

TrainReport train_hr(const TrainConfig& config, const fs::path& stage2_dir, const RunDir& run,
                     const ProgressFn& progress) {
  const Stage2Data data = load_stage2(stage2_dir);
  const model::ModelProfile& profile = data.profile;
  TrainConfig resolved = config;
  resolved.profile = profile.name;
  resolved.hr_scale = data.scale;
  const auto extractor = loss::make_extractor(config.extractor);
  Config extra;
  extra.set("run.stage", "hr");
  extra.set("run.dataset", stage2_dir.string());
  write_snapshot(run, resolved, extra);
  const std::string config_hash = resolved_config(resolved).hash();

  Rng init(config.seed);
  model::HrDecoder hr(data.scale, profile.hr_width, init);
  model::QualityDiscriminator disc(profile.face_size * data.scale, profile.disc_channels, false,
                                   init);
  nn::Adam opt_g(hr.named_parameters(), {.lr = config.learning_rate});
  nn::Adam opt_d(disc.named_parameters(), {.lr = config.learning_rate});
  Rng sampler = Rng(config.seed).fork(1);
  CsvLog log(run.logs() / "train_hr.csv");
  TrainReport report;

  const auto checkpoint = [&](int step) {
    Checkpoint ckpt{std::string(kHrKind), profile.name, step, config_hash, {}, {}};
    ckpt.meta = {{"scale", data.scale},
                 {"width", profile.hr_width},
                 {"uses_sketch", !config.zero_sketch}};
    store_module(hr, ckpt.tensors, "hr.");
    store_module(disc, ckpt.tensors, "disc.");
    store_state(opt_g.state(), ckpt.tensors, "opt_g.");
    store_state(opt_d.state(), ckpt.tensors, "opt_d.");
    return ckpt;
  };

  const int batch = config.effective_batch();
  const auto& w = config.weights.hr;
  for (int step = 1; step <= config.steps; ++step) {
    std::vector<int64_t> index;
    std::vector<face::LipRegion> regions;
    for (int b = 0; b < batch; ++b) {
      index.push_back(sampler.randint(0, data.size()));
      regions.push_back(data.regions[index.back()]);
    }
    const nn::Tensor base = gather_rows(data.base, index);
    nn::Tensor sketch = gather_rows(data.sketch, index);
    if (config.zero_sketch) sketch = nn::Tensor(sketch.shape(), 0.0);
    const nn::Tensor gt = gather_rows(data.gt, index);
    const nn::Tensor fake = hr.forward(base, sketch);

    disc.set_trainable(true);
    disc.zero_grad();
    nn::Tensor d_loss = loss::disc_loss(disc.forward(gt), disc.forward(fake.detach()));
    d_loss.backward();
    opt_d.step();

    disc.set_trainable(false);
    hr.zero_grad();
    loss::HrLossTerms terms;
    terms.adversarial = loss::adv_loss(disc.forward(fake));
    terms.perceptual = loss::perceptual_l1(fake, gt, *extractor);
    terms.reconstruction = loss::recon_l1(fake, gt);
    terms.lip = loss::lip_loss(fake, gt, regions, *extractor);
    nn::Tensor total = loss::total_hr(terms, w);
    total.backward();
    opt_g.step();

    LossRow row{{"step", step},
                {"total", total.item()},
                {"adversarial", terms.adversarial.item()},
                {"perceptual", terms.perceptual.item()},
                {"reconstruction", terms.reconstruction.item()},
                {"lip", terms.lip.item()},
                {"disc", d_loss.item()}};
    log.append(row);
    report.history.push_back(row);
    if (progress) progress(step, config.steps, row);
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0 && step < config.steps)
      save_run_checkpoint(run, checkpoint(step), step, false);
  }
  disc.set_trainable(true);
  save_run_checkpoint(run, checkpoint(config.steps), config.steps, true);
  report.checkpoint = run.latest();
  return report;
}

LoadedGenerator load_generator(const fs::path& path) {
  const Checkpoint ckpt = load_checkpoint(path, kBaseKind);
  LoadedGenerator out{model::profile_by_name(ckpt.profile), nullptr};
  Rng rng(0);
  out.net = std::make_unique<model::BaseGenerator>(out.profile, rng);
  load_module(*out.net, ckpt.tensors, "gen.");
  return out;
}

LoadedSyncExpert load_sync_expert(const fs::path& path) {
  const Checkpoint ckpt = load_checkpoint(path, kSyncKind);
  LoadedSyncExpert out{model::profile_by_name(ckpt.profile), nullptr};
  Rng rng(0);
  out.net = std::make_unique<model::SyncExpert>(out.profile, rng);
  load_module(*out.net, ckpt.tensors, "sync.");
  return out;
}

LoadedHrDecoder load_hr_decoder(const fs::path& path) {
  const Checkpoint ckpt = load_checkpoint(path, kHrKind);
  LoadedHrDecoder out;
  out.profile = model::profile_by_name(ckpt.profile);
  try {
    out.scale = ckpt.meta.at("scale").get<int>();
    out.uses_sketch = ckpt.meta.at("uses_sketch").get<bool>();
    Rng rng(0);
    out.net = std::make_unique<model::HrDecoder>(out.scale, ckpt.meta.at("width").get<int64_t>(), rng);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptArchive, path.string() + ": HR metadata incomplete: " + e.what());
  }
  load_module(*out.net, ckpt.tensors, "hr.");
  return out;
}

double hr_reconstruction_l1(const fs::path& hr_ckpt, const fs::path& stage2_dir) {
  const LoadedHrDecoder hr = load_hr_decoder(hr_ckpt);
  const Stage2Data data = load_stage2(stage2_dir);
  require(hr.scale == data.scale && hr.profile == data.profile, ErrorCode::kArchitectureMismatch,
          "HR checkpoint does not match the stage-2 dataset");
  nn::NoGradGuard no_grad;
  double total = 0.0;
  for (int64_t start = 0; start < data.size(); start += kInferenceBatch) {
    std::vector<int64_t> index;
    for (int64_t i = start; i < std::min(data.size(), start + kInferenceBatch); ++i) index.push_back(i);
    nn::Tensor sketch = gather_rows(data.sketch, index);
    if (!hr.uses_sketch) sketch = nn::Tensor(sketch.shape(), 0.0);
    const nn::Tensor out = hr.net->forward(gather_rows(data.base, index), sketch);
    const nn::Tensor gt = gather_rows(data.gt, index);
    for (int64_t k = 0; k < out.numel(); ++k) total += std::abs(out.data()[k] - gt.data()[k]);
  }
  return total / static_cast<double>(data.gt.numel());
}

}  // namespace hyperlips::train
