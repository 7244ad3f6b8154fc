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

#ifndef HYPERLIPS_NN_MODULE_H_
#define HYPERLIPS_NN_MODULE_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hyperlips/nn/tensor.h"
#include "hyperlips/rng.h"

namespace hyperlips::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

using TensorMap = std::map<std::string, Tensor>;

// Parameter container with dotted hierarchical names. Modules register their
// children by address, so they are neither copyable nor movable; own them
// through unique_ptr when they must be relocated.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  std::vector<NamedTensor> named_parameters() const;
  std::vector<Tensor> parameters() const;
  int64_t parameter_count() const;

  // Toggles requires_grad on every parameter (freezing).
  void set_trainable(bool trainable);
  void zero_grad();

  TensorMap state() const;
  // Copies values by name; every parameter must be present with its shape.
  void load_state(const TensorMap& state);

 protected:
  Tensor register_parameter(std::string name, Tensor value);
  void register_module(std::string name, Module& child);

 private:
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;

  std::vector<NamedTensor> params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

// He-uniform initialisation for a layer followed by leaky-ReLU(slope).
void kaiming_uniform(Tensor& t, int64_t fan_in, double slope, Rng& rng);
void uniform_fill(Tensor& t, double bound, Rng& rng);

}  // namespace hyperlips::nn

#endif  // HYPERLIPS_NN_MODULE_H_
