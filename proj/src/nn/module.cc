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

#include "hyperlips/nn/module.h"

#include <algorithm>
#include <cmath>

#include "hyperlips/error.h"

namespace hyperlips::nn {

void Module::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  for (const auto& p : params_) out.push_back({prefix + p.name, p.tensor});
  for (const auto& [name, child] : children_) child->collect(prefix + name + ".", out);
}

std::vector<NamedTensor> Module::named_parameters() const {
  std::vector<NamedTensor> out;
  collect("", out);
  return out;
}

std::vector<Tensor> Module::parameters() const {
  std::vector<Tensor> out;
  for (auto& p : named_parameters()) out.push_back(p.tensor);
  return out;
}

int64_t Module::parameter_count() const {
  int64_t n = 0;
  for (const auto& p : named_parameters()) n += p.tensor.numel();
  return n;
}

void Module::set_trainable(bool trainable) {
  for (auto& p : named_parameters()) p.tensor.set_requires_grad(trainable);
}

void Module::zero_grad() {
  for (auto& p : named_parameters()) p.tensor.zero_grad();
}

TensorMap Module::state() const {
  TensorMap out;
  for (const auto& p : named_parameters()) out.emplace(p.name, p.tensor);
  return out;
}

void Module::load_state(const TensorMap& state) {
  for (auto& p : named_parameters()) {
    auto it = state.find(p.name);
    require(it != state.end(), ErrorCode::kArchitectureMismatch,
            "checkpoint lacks parameter '" + p.name + "'");
    require(it->second.shape() == p.tensor.shape(), ErrorCode::kArchitectureMismatch,
            "parameter '" + p.name + "' has shape " + shape_str(it->second.shape()) +
                ", expected " + shape_str(p.tensor.shape()));
    auto src = it->second.data();
    std::copy(src.begin(), src.end(), p.tensor.data().begin());
  }
}

Tensor Module::register_parameter(std::string name, Tensor value) {
  value.set_requires_grad(true);
  params_.push_back({std::move(name), value});
  return value;
}

void Module::register_module(std::string name, Module& child) {
  children_.emplace_back(std::move(name), &child);
}

void kaiming_uniform(Tensor& t, int64_t fan_in, double slope, Rng& rng) {
  const double gain = std::sqrt(2.0 / (1.0 + slope * slope));
  uniform_fill(t, gain * std::sqrt(3.0 / static_cast<double>(fan_in)), rng);
}

void uniform_fill(Tensor& t, double bound, Rng& rng) {
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
}

}  // namespace hyperlips::nn
