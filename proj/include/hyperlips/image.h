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

#ifndef HYPERLIPS_IMAGE_H_
#define HYPERLIPS_IMAGE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hyperlips/nn/tensor.h"

namespace hyperlips {

// 8-bit interleaved RGB, the on-the-wire frame format.
struct RgbFrame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  RgbFrame() = default;
  RgbFrame(int w, int h, uint8_t fill = 0)
      : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, fill) {}

  uint8_t& at(int y, int x, int c) { return rgb[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  uint8_t at(int y, int x, int c) const {
    return rgb[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const RgbFrame&) const = default;
};

// Planar float image (C x H x W), values nominally in [0, 1].
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Image() = default;
  Image(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w), data(static_cast<size_t>(c) * h * w, fill) {}

  double& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  bool same_shape(const Image& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  bool operator==(const Image&) const = default;
};

Image to_image(const RgbFrame& frame);
RgbFrame to_frame(const Image& image);

// Bilinear resampling with half-pixel centres; same-size input is returned
// bit-exact.
Image resize_bilinear(const Image& src, int height, int width);

// Stacks same-shaped images into an [N, C, H, W] tensor.
nn::Tensor stack_images(std::span<const Image> images);
Image tensor_to_image(const nn::Tensor& batch, int64_t index);

double luminance(double r, double g, double b);

}  // namespace hyperlips

#endif  // HYPERLIPS_IMAGE_H_
