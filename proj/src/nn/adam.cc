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

#include "hyperlips/nn/adam.h"

#include <cmath>

#include "hyperlips/error.h"

namespace hyperlips::nn {

Adam::Adam(std::vector<NamedTensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  require(options_.lr > 0.0, ErrorCode::kInvalidArgument, "learning rate must be positive");
  for (const auto& p : params_) {
    m_.emplace_back(static_cast<size_t>(p.tensor.numel()), 0.0);
    v_.emplace_back(static_cast<size_t>(p.tensor.numel()), 0.0);
  }
}

void Adam::step() {
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (size_t k = 0; k < params_.size(); ++k) {
    Tensor& t = params_[k].tensor;
    if (!t.has_grad()) continue;
    auto w = t.data();
    auto g = t.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= options_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

TensorMap Adam::state() const {
  TensorMap out;
  for (size_t k = 0; k < params_.size(); ++k) {
    const Shape& s = params_[k].tensor.shape();
    out.emplace("adam.m." + params_[k].name, Tensor(s, m_[k]));
    out.emplace("adam.v." + params_[k].name, Tensor(s, v_[k]));
  }
  out.emplace("adam.step", Tensor::scalar(static_cast<double>(step_)));
  return out;
}

void Adam::load_state(const TensorMap& state) {
  auto step_it = state.find("adam.step");
  require(step_it != state.end(), ErrorCode::kCorruptArchive, "optimizer state lacks step");
  step_ = static_cast<int64_t>(step_it->second.item());
  for (size_t k = 0; k < params_.size(); ++k) {
    for (auto [prefix, dst] : {std::pair{"adam.m.", &m_[k]}, std::pair{"adam.v.", &v_[k]}}) {
      auto it = state.find(prefix + params_[k].name);
      require(it != state.end() && it->second.numel() == static_cast<int64_t>(dst->size()),
              ErrorCode::kArchitectureMismatch,
              "optimizer state does not match parameter '" + params_[k].name + "'");
      dst->assign(it->second.data().begin(), it->second.data().end());
    }
  }
}

}  // namespace hyperlips::nn
