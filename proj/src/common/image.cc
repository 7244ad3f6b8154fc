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

#include "hyperlips/image.h"

#include <algorithm>
#include <cmath>

#include "hyperlips/error.h"

namespace hyperlips {

Image to_image(const RgbFrame& frame) {
  Image img(3, frame.height, frame.width);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = frame.at(y, x, c) / 255.0;
  return img;
}

RgbFrame to_frame(const Image& image) {
  require(image.channels == 3, ErrorCode::kShapeMismatch, "to_frame needs 3 channels");
  RgbFrame frame(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(image.at(c, y, x), 0.0, 1.0);
        frame.at(y, x, c) = static_cast<uint8_t>(std::lround(v * 255.0));
      }
  return frame;
}

Image resize_bilinear(const Image& src, int height, int width) {
  require(height > 0 && width > 0 && src.height > 0 && src.width > 0, ErrorCode::kShapeMismatch,
          "resize to or from an empty image");
  if (height == src.height && width == src.width) return src;
  Image out(src.channels, height, width);
  const double sy = static_cast<double>(src.height) / height;
  const double sx = static_cast<double>(src.width) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < src.channels; ++c) {
        const double top = src.at(c, y0, x0) * (1 - wx) + src.at(c, y0, x1) * wx;
        const double bottom = src.at(c, y1, x0) * (1 - wx) + src.at(c, y1, x1) * wx;
        out.at(c, y, x) = top * (1 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

nn::Tensor stack_images(std::span<const Image> images) {
  require(!images.empty(), ErrorCode::kShapeMismatch, "stack of no images");
  const Image& first = images.front();
  std::vector<double> values;
  values.reserve(images.size() * first.data.size());
  for (const auto& img : images) {
    require(img.same_shape(first), ErrorCode::kShapeMismatch, "stacked images differ in shape");
    values.insert(values.end(), img.data.begin(), img.data.end());
  }
  return nn::Tensor({static_cast<int64_t>(images.size()), first.channels, first.height,
                     first.width},
                    std::move(values));
}

Image tensor_to_image(const nn::Tensor& batch, int64_t index) {
  require(batch.rank() == 4 && index >= 0 && index < batch.dim(0), ErrorCode::kShapeMismatch,
          "tensor_to_image on " + nn::shape_str(batch.shape()));
  Image img(static_cast<int>(batch.dim(1)), static_cast<int>(batch.dim(2)),
            static_cast<int>(batch.dim(3)));
  const size_t n = img.data.size();
  std::copy_n(batch.data().begin() + index * n, n, img.data.begin());
  return img;
}

double luminance(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace hyperlips
