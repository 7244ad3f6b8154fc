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

#ifndef HYPERLIPS_TRAIN_CONFIG_H_
#define HYPERLIPS_TRAIN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "hyperlips/loss/losses.h"

namespace hyperlips::train {

// Sectioned key/value settings ("section.key") read from INI text. Flag
// overrides are applied with set(); the resolved form is written next to
// every run and its hash is stored in checkpoints.
class Config {
 public:
  static Config parse(const std::string& ini_text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return values_.contains(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Canonical INI text, sections and keys sorted.
  std::string to_ini() const;
  // CRC-32 of to_ini() as eight hex digits.
  std::string hash() const;
  void save(const std::filesystem::path& path) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct TrainConfig {
  std::string profile = "toy";
  // 0 selects the profile default (toy 4, full 8).
  int batch_size = 0;
  int steps = 2000;
  double learning_rate = 1e-4;
  uint64_t seed = 0;
  // 0 keeps only the final checkpoint.
  int checkpoint_every = 500;
  // Generator steps trained on reconstruction alone before the adversarial,
  // perceptual and sync terms are switched on.
  int warmup_steps = 0;
  std::string extractor = "random-fixed-v1";
  loss::LossWeights weights;
  int hr_scale = 2;
  bool zero_sketch = false;

  int effective_batch() const;
};

// Missing keys take the defaults above; InvalidArgument for malformed or
// out-of-range values.
TrainConfig train_config_from(const Config& config);
// Every TrainConfig field written out, for snapshots.
Config resolved_config(const TrainConfig& train);

}  // namespace hyperlips::train

#endif  // HYPERLIPS_TRAIN_CONFIG_H_
