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

#include "hyperlips/train/checkpoint.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "hyperlips/error.h"

namespace hyperlips::train {
namespace {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes little endian");

constexpr char kMagic[4] = {'H', 'L', 'C', 'K'};
constexpr size_t kPreambleSize = 4 + 4 + 8;

template <class T>
void put(std::vector<char>& out, T value) {
  const char* p = reinterpret_cast<const char*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T get(const std::vector<char>& in, size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return value;
}

uint32_t crc_of(const char* data, size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (size > 0) {
    const auto piece = static_cast<uInt>(std::min<size_t>(size, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), piece);
    data += piece;
    size -= piece;
  }
  return static_cast<uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& why) {
  fail(ErrorCode::kCorruptArchive, path.string() + ": " + why);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path,
                     TensorStorage storage) {
  const bool f32 = storage == TensorStorage::kFloat32;
  nlohmann::json header = {{"kind", ckpt.kind},
                           {"profile", ckpt.profile},
                           {"step", ckpt.step},
                           {"config_hash", ckpt.config_hash},
                           {"meta", ckpt.meta},
                           {"dtype", f32 ? "f32" : "f64"}};
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, t] : ckpt.tensors) entries.push_back({{"name", name}, {"shape", t.shape()}});
  header["tensors"] = std::move(entries);
  const std::string header_text = header.dump();

  std::vector<char> out(kMagic, kMagic + 4);
  put<uint32_t>(out, kCheckpointFormatVersion);
  put<uint64_t>(out, header_text.size());
  out.insert(out.end(), header_text.begin(), header_text.end());
  for (const auto& [name, t] : ckpt.tensors)
    for (double v : t.data()) {
      if (f32)
        put<float>(out, static_cast<float>(v));
      else
        put<double>(out, v);
    }
  put<uint32_t>(out, crc_of(out.data(), out.size()));

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(f.good(), ErrorCode::kWriteFailure, "cannot open " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    require(f.good(), ErrorCode::kWriteFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::kWriteFailure, "cannot move archive into " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::kCorruptArchive, "cannot open " + path.string());
  const std::vector<char> in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < kPreambleSize + 4 || std::memcmp(in.data(), kMagic, 4) != 0)
    corrupt(path, "not a checkpoint archive");
  const auto version = get<uint32_t>(in, 4);
  require(version == kCheckpointFormatVersion, ErrorCode::kVersionMismatch,
          path.string() + " has format version " + std::to_string(version) + ", expected " +
              std::to_string(kCheckpointFormatVersion));
  const size_t body = in.size() - 4;
  if (crc_of(in.data(), body) != get<uint32_t>(in, body)) corrupt(path, "checksum mismatch");
  const auto header_len = get<uint64_t>(in, 8);
  if (header_len > body - kPreambleSize) corrupt(path, "header overruns file");

  Checkpoint ckpt;
  size_t offset = kPreambleSize + header_len;
  try {
    const auto header = nlohmann::json::parse(in.begin() + kPreambleSize, in.begin() + offset);
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.profile = header.at("profile").get<std::string>();
    ckpt.step = header.at("step").get<int64_t>();
    ckpt.config_hash = header.at("config_hash").get<std::string>();
    ckpt.meta = header.at("meta");
    const bool f32 = header.at("dtype").get<std::string>() == "f32";
    const size_t width = f32 ? sizeof(float) : sizeof(double);
    for (const auto& e : header.at("tensors")) {
      nn::Tensor t(e.at("shape").get<nn::Shape>());
      const size_t bytes = static_cast<size_t>(t.numel()) * width;
      if (bytes > body - offset) corrupt(path, "payload truncated");
      auto d = t.data();
      for (size_t i = 0; i < d.size(); ++i)
        d[i] = f32 ? get<float>(in, offset + i * width) : get<double>(in, offset + i * width);
      offset += bytes;
      ckpt.tensors.emplace(e.at("name").get<std::string>(), std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    corrupt(path, std::string("malformed header: ") + e.what());
  }
  if (offset != body) corrupt(path, "trailing bytes after payload");
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::string_view expected_kind) {
  Checkpoint ckpt = load_checkpoint(path);
  require(ckpt.kind == expected_kind, ErrorCode::kArchitectureMismatch,
          path.string() + " holds a '" + ckpt.kind + "' checkpoint, expected '" +
              std::string(expected_kind) + "'");
  return ckpt;
}

nn::TensorMap extract_prefixed(const nn::TensorMap& tensors, std::string_view prefix) {
  nn::TensorMap out;
  for (const auto& [name, t] : tensors)
    if (name.starts_with(prefix)) out.emplace(name.substr(prefix.size()), t);
  return out;
}

void load_module(nn::Module& module, const nn::TensorMap& tensors, std::string_view prefix) {
  module.load_state(extract_prefixed(tensors, prefix));
}

void store_state(const nn::TensorMap& state, nn::TensorMap& tensors, std::string_view prefix) {
  for (const auto& [name, t] : state) tensors.insert_or_assign(std::string(prefix) + name, t.clone());
}

void store_module(const nn::Module& module, nn::TensorMap& tensors, std::string_view prefix) {
  store_state(module.state(), tensors, prefix);
}

}  // namespace hyperlips::train
