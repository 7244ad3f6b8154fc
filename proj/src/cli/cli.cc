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

#include "hyperlips/cli/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hyperlips/error.h"
#include "hyperlips/eval/metrics.h"
#include "hyperlips/pipeline/dubbing.h"
#include "hyperlips/train/config.h"
#include "hyperlips/train/toy_dataset.h"
#include "hyperlips/train/trainer.h"

namespace hyperlips::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kProgressEvery = 100;

// Options shared by every subcommand.
struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  bool force = false;
};

// Training flags that map onto config keys.
struct TrainFlags {
  std::optional<int> steps;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::string> profile;
  std::optional<int> checkpoint_every;
  std::optional<int> scale;
  bool zero_sketch = false;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config_file, "INI file with settings")->check(CLI::ExistingFile);
  cmd.add_option("--set", c.overrides, "Override a setting, section.key=value");
  cmd.add_option("--seed", c.seed, "Seed for all randomness");
  cmd.add_flag("--force", c.force, "Overwrite existing outputs");
}

void add_train_flags(CLI::App& cmd, TrainFlags& t) {
  cmd.add_option("--steps", t.steps, "Optimiser steps")->check(CLI::NonNegativeNumber);
  cmd.add_option("--batch-size", t.batch_size, "Batch size (0 = profile default)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--lr", t.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  cmd.add_option("--profile", t.profile, "Model profile")->check(CLI::IsMember({"toy", "full"}));
  cmd.add_option("--checkpoint-every", t.checkpoint_every, "Steps between checkpoints")
      ->check(CLI::NonNegativeNumber);
}

train::Config resolve(const Common& c, const TrainFlags* t) {
  train::Config config = c.config_file.empty() ? train::Config{} : train::Config::load(c.config_file);
  for (const std::string& kv : c.overrides) {
    const size_t eq = kv.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::kInvalidArgument,
            "--set expects section.key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) config.set("train.seed", std::to_string(*c.seed));
  if (t != nullptr) {
    if (t->steps) config.set("train.steps", std::to_string(*t->steps));
    if (t->batch_size) config.set("train.batch_size", std::to_string(*t->batch_size));
    if (t->learning_rate) {
      std::ostringstream s;
      s.precision(17);
      s << *t->learning_rate;
      config.set("train.learning_rate", s.str());
    }
    if (t->profile) config.set("train.profile", *t->profile);
    if (t->checkpoint_every) config.set("train.checkpoint_every", std::to_string(*t->checkpoint_every));
    if (t->scale) config.set("hr.scale", std::to_string(*t->scale));
    if (t->zero_sketch) config.set("hr.zero_sketch", "true");
  }
  return config;
}

bool occupied(const fs::path& p) {
  if (!fs::exists(p)) return false;
  return !fs::is_directory(p) || !fs::is_empty(p);
}

void claim_output(const fs::path& p, bool force) {
  require(force || !occupied(p), ErrorCode::kOutputExists,
          p.string() + " already exists; pass --force to overwrite");
}

fs::path sidecar(const fs::path& file, std::string_view suffix) {
  fs::path p = file;
  p += suffix;
  return p;
}

train::ProgressFn progress_printer(std::ostream& err, std::string_view stage) {
  return [&err, stage](int step, int total, const train::LossRow& row) {
    if (step % kProgressEvery != 0 && step != total) return;
    err << stage << " step " << step << "/" << total;
    for (const auto& [k, v] : row)
      if (k != "step") err << " " << k << "=" << v;
    err << "\n";
  };
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audio-driven lip-sync video generation", "hyperlips"};
  app.require_subcommand(1);
  std::function<void()> action;

  Common common;
  TrainFlags flags;

  auto* toy = app.add_subcommand("make-toy-data", "Write a synthetic talking-face dataset");
  add_common(*toy, common);
  fs::path toy_out;
  int toy_clips = 32;
  double toy_duration = 2.0;
  int toy_size = 96;
  toy->add_option("--out", toy_out, "Output directory")->required();
  toy->add_option("--clips", toy_clips, "Number of clips")->check(CLI::PositiveNumber);
  toy->add_option("--duration", toy_duration, "Clip length in seconds")->check(CLI::PositiveNumber);
  toy->add_option("--frame-size", toy_size, "Frame side in pixels")->check(CLI::Range(32, 1024));
  toy->callback([&] {
    action = [&] {
      claim_output(toy_out, common.force);
      train::Config config = resolve(common, nullptr);
      train::ToyDatasetOptions options;
      options.clips = toy_clips;
      options.seed = static_cast<uint64_t>(config.get_int("train.seed", 0));
      options.clip.duration = toy_duration;
      options.clip.frame_size = toy_size;
      config.set("toy.clips", std::to_string(toy_clips));
      config.set("toy.duration", std::to_string(toy_duration));
      config.set("toy.frame_size", std::to_string(toy_size));
      config.set("train.seed", std::to_string(options.seed));
      train::make_toy_dataset(options, toy_out);
      config.save(toy_out / "config.ini");
    };
  });

  fs::path data_dir, run_dir, sync_ckpt, base_ckpt, hr_ckpt, stage2_dir;

  auto* sync = app.add_subcommand("train-sync", "Train the audio-visual sync expert");
  add_common(*sync, common);
  add_train_flags(*sync, flags);
  sync->add_option("--data", data_dir, "Dataset directory")->required();
  sync->add_option("--out", run_dir, "Run directory")->required();
  sync->callback([&] {
    action = [&] {
      const train::TrainConfig cfg = train::train_config_from(resolve(common, &flags));
      claim_output(run_dir, common.force);
      const auto report = train::train_sync(cfg, train::load_dataset(data_dir),
                                            train::create_run_dir(run_dir),
                                            progress_printer(err, "train-sync"));
      out << report.checkpoint.string() << "\n";
    };
  });

  auto* base = app.add_subcommand("train-base", "Train the stage-1 generator");
  add_common(*base, common);
  add_train_flags(*base, flags);
  base->add_option("--data", data_dir, "Dataset directory")->required();
  base->add_option("--sync-ckpt", sync_ckpt, "Sync expert checkpoint")->required();
  base->add_option("--out", run_dir, "Run directory")->required();
  base->callback([&] {
    action = [&] {
      const train::TrainConfig cfg = train::train_config_from(resolve(common, &flags));
      claim_output(run_dir, common.force);
      const auto report = train::train_base(cfg, train::load_dataset(data_dir), sync_ckpt,
                                            train::create_run_dir(run_dir),
                                            progress_printer(err, "train-base"));
      out << report.checkpoint.string() << "\n";
    };
  });

  auto* stage2 = app.add_subcommand("build-stage2", "Build the stage-2 training set");
  add_common(*stage2, common);
  stage2->add_option("--data", data_dir, "Dataset directory")->required();
  stage2->add_option("--base-ckpt", base_ckpt, "Stage-1 checkpoint")->required();
  stage2->add_option("--out", stage2_dir, "Output directory")->required();
  stage2->add_option("--scale", flags.scale, "Upscale factor")->check(CLI::IsMember({1, 2, 4}));
  stage2->callback([&] {
    action = [&] {
      train::Config config = resolve(common, &flags);
      const train::TrainConfig cfg = train::train_config_from(config);
      claim_output(stage2_dir, common.force);
      const auto report =
          train::build_stage2_dataset(base_ckpt, train::load_dataset(data_dir), stage2_dir,
                                      cfg.hr_scale, cfg.seed);
      train::Config snapshot = train::resolved_config(cfg);
      snapshot.set("run.data", data_dir.string());
      snapshot.set("run.base_ckpt", base_ckpt.string());
      snapshot.save(stage2_dir / "config.ini");
      err << "build-stage2 samples=" << report.samples << " skipped=" << report.skipped << "\n";
      out << report.archive.string() << "\n";
    };
  });

  auto* hr = app.add_subcommand("train-hr", "Train the stage-2 high-resolution decoder");
  add_common(*hr, common);
  add_train_flags(*hr, flags);
  hr->add_option("--stage2", stage2_dir, "Stage-2 dataset directory")->required();
  hr->add_option("--out", run_dir, "Run directory")->required();
  hr->add_flag("--zero-sketch", flags.zero_sketch, "Train without sketch guidance");
  hr->callback([&] {
    action = [&] {
      const train::TrainConfig cfg = train::train_config_from(resolve(common, &flags));
      claim_output(run_dir, common.force);
      const auto report = train::train_hr(cfg, stage2_dir, train::create_run_dir(run_dir),
                                          progress_printer(err, "train-hr"));
      out << report.checkpoint.string() << "\n";
    };
  });

  auto* dub = app.add_subcommand("dub", "Lip-sync a video to new audio");
  add_common(*dub, common);
  fs::path video, audio, out_file;
  std::optional<fs::path> dub_hr;
  std::optional<int> ref_frame;
  bool no_fusion = false;
  dub->add_option("--video", video, "Source video")->required()->check(CLI::ExistingFile);
  dub->add_option("--audio", audio, "Driving audio")->required()->check(CLI::ExistingFile);
  dub->add_option("--base-ckpt", base_ckpt, "Stage-1 checkpoint")->required();
  dub->add_option("--hr-ckpt", dub_hr, "Stage-2 checkpoint");
  dub->add_option("--ref-frame", ref_frame, "Reference frame index")->check(CLI::NonNegativeNumber);
  dub->add_flag("--no-fusion", no_fusion, "Paste the generated face without the blend mask");
  dub->add_option("--out", out_file, "Output video")->required();
  dub->callback([&] {
    action = [&] {
      train::Config config = resolve(common, nullptr);
      claim_output(out_file, common.force);
      pipeline::DubOptions options{base_ckpt, dub_hr, ref_frame, !no_fusion};
      const auto result = pipeline::dub(video, audio, options, out_file);
      config.set("run.video", video.string());
      config.set("run.audio", audio.string());
      config.set("run.base_ckpt", base_ckpt.string());
      if (dub_hr) config.set("run.hr_ckpt", dub_hr->string());
      config.set("run.fusion", no_fusion ? "false" : "true");
      config.set("run.ref_frame", std::to_string(result.reference_frame));
      config.save(sidecar(out_file, ".config.ini"));
      err << "dub frames=" << result.frames << " reference=" << result.reference_frame << "\n";
    };
  });

  auto* ev = app.add_subcommand("eval", "Score a generated video against the ground truth");
  add_common(*ev, common);
  fs::path gen, gt;
  eval::EvalOptions eval_options;
  ev->add_option("--gen", gen, "Generated video")->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", gt, "Ground-truth video")->required()->check(CLI::ExistingFile);
  ev->add_option("--audio", audio, "Driving audio")->required()->check(CLI::ExistingFile);
  ev->add_option("--sync-ckpt", eval_options.sync_ckpt, "Sync expert checkpoint")->required();
  ev->add_option("--ref-frame", eval_options.reference_frame,
                 "Reference frame of the freeze baseline")
      ->check(CLI::NonNegativeNumber);
  ev->add_option("--out", out_file, "Report JSON")->required();
  ev->callback([&] {
    action = [&] {
      train::Config config = resolve(common, nullptr);
      claim_output(out_file, common.force);
      const eval::EvalReport report = eval::evaluate(gen, gt, audio, eval_options);
      std::ofstream f(out_file, std::ios::trunc);
      f << report.to_json().dump(2) << "\n";
      require(f.good(), ErrorCode::kWriteFailure, "cannot write " + out_file.string());
      config.set("run.gen", gen.string());
      config.set("run.gt", gt.string());
      config.set("run.audio", audio.string());
      config.set("run.sync_ckpt", eval_options.sync_ckpt.string());
      config.save(sidecar(out_file, ".config.ini"));
      out << report.to_json().dump() << "\n";
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace hyperlips::cli
