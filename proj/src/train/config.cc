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

#include "hyperlips/train/config.h"

#include <zlib.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hyperlips/error.h"
#include "hyperlips/model/profile.h"

namespace hyperlips::train {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorCode::kInvalidArgument, "config value " + key + " = '" + value + "' is invalid");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Config Config::parse(const std::string& ini_text) {
  std::istringstream in(ini_text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed config: ") + e.what());
  }
  Config config;
  for (const auto& [section, body] : tree) {
    require(!body.empty(), ErrorCode::kInvalidArgument,
            "config key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) config.set(section + "." + key, value.data());
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::kInvalidArgument, "cannot read config " + path.string());
  std::stringstream text;
  text << f.rdbuf();
  return parse(text.str());
}

void Config::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  require(dot != std::string::npos && dot > 0 && dot + 1 < key.size() &&
              key.find('.', dot + 1) == std::string::npos,
          ErrorCode::kInvalidArgument, "config key '" + key + "' must be section.name");
  values_[key] = value;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) bad_value(key, *v);
  return out;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    size_t used = 0;
    const double out = std::stod(*v, &used);
    if (used != v->size()) bad_value(key, *v);
    return out;
  } catch (const std::logic_error&) {
    bad_value(key, *v);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  bad_value(key, *v);
}

std::string Config::to_ini() const {
  std::string out, section;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

std::string Config::hash() const {
  const std::string text = to_ini();
  const auto crc = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
                         static_cast<uInt>(text.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

void Config::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), ErrorCode::kWriteFailure, "cannot write " + path.string());
  f << to_ini();
  require(f.good(), ErrorCode::kWriteFailure, "short write to " + path.string());
}

int TrainConfig::effective_batch() const {
  if (batch_size > 0) return batch_size;
  return profile == "full" ? 8 : 4;
}

TrainConfig train_config_from(const Config& c) {
  TrainConfig t;
  t.profile = c.get_string("train.profile", t.profile);
  model::profile_by_name(t.profile);
  t.batch_size = static_cast<int>(c.get_int("train.batch_size", t.batch_size));
  t.steps = static_cast<int>(c.get_int("train.steps", t.steps));
  t.learning_rate = c.get_double("train.learning_rate", t.learning_rate);
  t.seed = static_cast<uint64_t>(c.get_int("train.seed", static_cast<int64_t>(t.seed)));
  t.checkpoint_every = static_cast<int>(c.get_int("train.checkpoint_every", t.checkpoint_every));
  t.extractor = c.get_string("loss.extractor", t.extractor);
  auto& b = t.weights.base;
  b.adversarial = c.get_double("loss.base_adversarial", b.adversarial);
  b.reconstruction = c.get_double("loss.base_reconstruction", b.reconstruction);
  b.lpips = c.get_double("loss.base_lpips", b.lpips);
  b.sync = c.get_double("loss.base_sync", b.sync);
  auto& h = t.weights.hr;
  h.adversarial = c.get_double("loss.hr_adversarial", h.adversarial);
  h.perceptual = c.get_double("loss.hr_perceptual", h.perceptual);
  h.reconstruction = c.get_double("loss.hr_reconstruction", h.reconstruction);
  h.lip = c.get_double("loss.hr_lip", h.lip);
  t.hr_scale = static_cast<int>(c.get_int("hr.scale", t.hr_scale));
  t.warmup_steps = static_cast<int>(c.get_int("train.warmup_steps", t.warmup_steps));
  t.zero_sketch = c.get_bool("hr.zero_sketch", t.zero_sketch);

  require(t.batch_size >= 0, ErrorCode::kInvalidArgument, "train.batch_size must be >= 0");
  require(t.steps >= 0, ErrorCode::kInvalidArgument, "train.steps must be >= 0");
  require(t.learning_rate > 0.0, ErrorCode::kInvalidArgument, "train.learning_rate must be > 0");
  require(t.warmup_steps >= 0, ErrorCode::kInvalidArgument, "train.warmup_steps must be >= 0");
  require(t.checkpoint_every >= 0, ErrorCode::kInvalidArgument,
          "train.checkpoint_every must be >= 0");
  require(t.hr_scale == 1 || t.hr_scale == 2 || t.hr_scale == 4, ErrorCode::kInvalidArgument,
          "hr.scale must be 1, 2 or 4");
  loss::validate(t.weights);
  return t;
}

Config resolved_config(const TrainConfig& t) {
  Config c;
  c.set("train.profile", t.profile);
  c.set("train.batch_size", std::to_string(t.effective_batch()));
  c.set("train.steps", std::to_string(t.steps));
  c.set("train.learning_rate", format_double(t.learning_rate));
  c.set("train.seed", std::to_string(t.seed));
  c.set("train.checkpoint_every", std::to_string(t.checkpoint_every));
  c.set("train.warmup_steps", std::to_string(t.warmup_steps));
  c.set("loss.extractor", t.extractor);
  c.set("loss.base_adversarial", format_double(t.weights.base.adversarial));
  c.set("loss.base_reconstruction", format_double(t.weights.base.reconstruction));
  c.set("loss.base_lpips", format_double(t.weights.base.lpips));
  c.set("loss.base_sync", format_double(t.weights.base.sync));
  c.set("loss.hr_adversarial", format_double(t.weights.hr.adversarial));
  c.set("loss.hr_perceptual", format_double(t.weights.hr.perceptual));
  c.set("loss.hr_reconstruction", format_double(t.weights.hr.reconstruction));
  c.set("loss.hr_lip", format_double(t.weights.hr.lip));
  c.set("hr.scale", std::to_string(t.hr_scale));
  c.set("hr.zero_sketch", t.zero_sketch ? "true" : "false");
  return c;
}

}  // namespace hyperlips::train
