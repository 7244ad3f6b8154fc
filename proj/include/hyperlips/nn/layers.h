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

#ifndef HYPERLIPS_NN_LAYERS_H_
#define HYPERLIPS_NN_LAYERS_H_

#include "hyperlips/nn/module.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::nn {

class Conv2d : public Module {
 public:
  Conv2d(int64_t in, int64_t out, int kernel, int stride, int padding, Rng& rng,
         double init_slope = 0.01);
  Tensor forward(const Tensor& x) const;

  int64_t out_channels() const { return weight_.dim(0); }

 private:
  Tensor weight_;
  Tensor bias_;
  int stride_;
  int padding_;
};

class ConvTranspose2d : public Module {
 public:
  ConvTranspose2d(int64_t in, int64_t out, int kernel, int stride, int padding, Rng& rng,
                  double init_slope = 0.01);
  Tensor forward(const Tensor& x) const;

 private:
  Tensor weight_;
  Tensor bias_;
  int stride_;
  int padding_;
};

class Linear : public Module {
 public:
  Linear(int64_t in, int64_t out, Rng& rng, double init_slope = 0.01);
  Tensor forward(const Tensor& x) const;

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

// conv -> leaky-ReLU
class ConvAct : public Module {
 public:
  ConvAct(int64_t in, int64_t out, int kernel, int stride, int padding, double slope, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  Conv2d conv_;
  double slope_;
};

// act(x + conv(act(conv(x)))) at constant width and resolution.
class ResidualBlock : public Module {
 public:
  ResidualBlock(int64_t channels, double slope, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  Conv2d first_;
  Conv2d second_;
  double slope_;
};

}  // namespace hyperlips::nn

#endif  // HYPERLIPS_NN_LAYERS_H_
