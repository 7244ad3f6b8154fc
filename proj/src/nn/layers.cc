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

#include "hyperlips/nn/layers.h"

#include <algorithm>

namespace hyperlips::nn {

Conv2d::Conv2d(int64_t in, int64_t out, int kernel, int stride, int padding, Rng& rng,
               double init_slope)
    : stride_(stride), padding_(padding) {
  Tensor w(Shape{out, in, kernel, kernel});
  kaiming_uniform(w, in * kernel * kernel, init_slope, rng);
  weight_ = register_parameter("weight", w);
  bias_ = register_parameter("bias", Tensor(Shape{out}));
}

Tensor Conv2d::forward(const Tensor& x) const {
  return conv2d(x, weight_, bias_, stride_, padding_);
}

ConvTranspose2d::ConvTranspose2d(int64_t in, int64_t out, int kernel, int stride, int padding,
                                 Rng& rng, double init_slope)
    : stride_(stride), padding_(padding) {
  Tensor w(Shape{in, out, kernel, kernel});
  // Each output pixel sees roughly in * k * k / stride^2 taps.
  const int64_t fan_in = std::max<int64_t>(1, in * kernel * kernel / (stride * stride));
  kaiming_uniform(w, fan_in, init_slope, rng);
  weight_ = register_parameter("weight", w);
  bias_ = register_parameter("bias", Tensor(Shape{out}));
}

Tensor ConvTranspose2d::forward(const Tensor& x) const {
  return conv_transpose2d(x, weight_, bias_, stride_, padding_);
}

Linear::Linear(int64_t in, int64_t out, Rng& rng, double init_slope) {
  Tensor w(Shape{out, in});
  kaiming_uniform(w, in, init_slope, rng);
  weight_ = register_parameter("weight", w);
  bias_ = register_parameter("bias", Tensor(Shape{out}));
}

Tensor Linear::forward(const Tensor& x) const { return linear(x, weight_, bias_); }

ConvAct::ConvAct(int64_t in, int64_t out, int kernel, int stride, int padding, double slope,
                 Rng& rng)
    : conv_(in, out, kernel, stride, padding, rng, slope), slope_(slope) {
  register_module("conv", conv_);
}

Tensor ConvAct::forward(const Tensor& x) const { return leaky_relu(conv_.forward(x), slope_); }

ResidualBlock::ResidualBlock(int64_t channels, double slope, Rng& rng)
    : first_(channels, channels, 3, 1, 1, rng, slope),
      second_(channels, channels, 3, 1, 1, rng, slope),
      slope_(slope) {
  register_module("conv1", first_);
  register_module("conv2", second_);
  // Start near identity so deep stacks train from a pass-through.
  for (double& v : second_.named_parameters()[0].tensor.data()) v *= 0.1;
}

Tensor ResidualBlock::forward(const Tensor& x) const {
  Tensor h = leaky_relu(first_.forward(x), slope_);
  return leaky_relu(add(x, second_.forward(h)), slope_);
}

}  // namespace hyperlips::nn
