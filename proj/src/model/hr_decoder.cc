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

#include "hyperlips/model/hr_decoder.h"

#include "hyperlips/error.h"
#include "hyperlips/nn/ops.h"

namespace hyperlips::model {
namespace {

constexpr double kSlope = 0.01;
constexpr int kResidualBlocks = 3;

}  // namespace

HrDecoder::HrDecoder(int scale, int64_t width, Rng& rng) : scale_(scale) {
  require(scale == 1 || scale == 2 || scale == 4, ErrorCode::kInvalidArgument,
          "HR scale must be 1, 2 or 4");
  stem_ = std::make_unique<nn::ConvAct>(4, width, 3, 1, 1, kSlope, rng);
  register_module("conv_base.stem", *stem_);
  for (int i = 0; i < kResidualBlocks; ++i) {
    blocks_.push_back(std::make_unique<nn::ResidualBlock>(width, kSlope, rng));
    register_module("conv_base.block" + std::to_string(i), *blocks_.back());
  }
  for (int s = scale; s > 1; s /= 2) {
    up_.push_back(std::make_unique<nn::ConvTranspose2d>(width, width, 4, 2, 1, rng, kSlope));
    register_module("up_conv" + std::to_string(up_.size() - 1), *up_.back());
  }
  head_ = std::make_unique<nn::ConvAct>(width, width, 3, 1, 1, kSlope, rng);
  out_ = std::make_unique<nn::Conv2d>(width, 3, 3, 1, 1, rng, 1.0);
  register_module("output_block.conv", *head_);
  register_module("output_block.out", *out_);
}

nn::Tensor HrDecoder::forward(const nn::Tensor& base, const nn::Tensor& sketch) const {
  require(base.rank() == 4 && base.dim(1) == 3, ErrorCode::kShapeMismatch,
          "base face must be [N, 3, S, S], got " + nn::shape_str(base.shape()));
  require(sketch.rank() == 4 && sketch.dim(1) == 1 && sketch.dim(0) == base.dim(0) &&
              sketch.dim(2) == base.dim(2) && sketch.dim(3) == base.dim(3),
          ErrorCode::kShapeMismatch,
          "sketch " + nn::shape_str(sketch.shape()) + " does not match base face " +
              nn::shape_str(base.shape()));
  nn::Tensor h = stem_->forward(nn::concat({base, sketch}, 1));
  for (const auto& b : blocks_) h = b->forward(h);
  for (const auto& u : up_) h = nn::leaky_relu(u->forward(h), kSlope);
  return nn::sigmoid(out_->forward(head_->forward(h)));
}

}  // namespace hyperlips::model
