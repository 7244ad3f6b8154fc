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

#ifndef HYPERLIPS_NN_ADAM_H_
#define HYPERLIPS_NN_ADAM_H_

#include <vector>

#include "hyperlips/nn/module.h"

namespace hyperlips::nn {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed, named parameter list.
class Adam {
 public:
  Adam(std::vector<NamedTensor> params, AdamOptions options);

  // Parameters without an accumulated gradient are left untouched.
  void step();
  void zero_grad();

  int64_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }

  // Moments as "adam.m.<param>", "adam.v.<param>" plus scalar "adam.step".
  TensorMap state() const;
  void load_state(const TensorMap& state);

 private:
  std::vector<NamedTensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamOptions options_;
  int64_t step_ = 0;
};

}  // namespace hyperlips::nn

#endif  // HYPERLIPS_NN_ADAM_H_
