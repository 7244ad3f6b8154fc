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

#ifndef HYPERLIPS_NN_OPS_H_
#define HYPERLIPS_NN_OPS_H_

#include <vector>

#include "hyperlips/nn/tensor.h"

// Differentiable tensor operations. Image tensors are NCHW throughout.
namespace hyperlips::nn {

// Elementwise, shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return mul_scalar(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return mul_scalar(a, s); }

Tensor leaky_relu(const Tensor& x, double slope);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);
// Gradient passes only where lo <= x <= hi.
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// Mean over everything but the leading axis: [N, ...] -> [N].
Tensor mean_per_sample(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& x, int axis, int64_t begin, int64_t end);

// x: [N, in], weight: [out, in], bias: [out] or undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// weight: [Cout, Cin, k, k]; square kernel, symmetric padding.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, int stride,
              int padding);

// weight: [Cin, Cout, k, k]. Output side = (in - 1) * stride - 2 * padding + k.
Tensor conv_transpose2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
                        int stride, int padding);

// Convolution whose kernel differs per sample. x: [N, C, H, W],
// kernels: [N, Cout * C * k * k] (row-major Cout, C, kh, kw), biases: [N, Cout].
// Stride 1, "same" padding k / 2, k odd.
Tensor sample_conv2d(const Tensor& x, const Tensor& kernels, const Tensor& biases,
                     int kernel_size);

// [N, C, H, W] -> [N, C].
Tensor global_avg_pool(const Tensor& x);
// 2x2 average pooling, ceil mode (edge windows average what they cover).
Tensor avg_pool2(const Tensor& x);

// Divides each (n, h, w) channel vector by (its L2 norm + eps).
Tensor channel_normalize(const Tensor& x, double eps = 1e-10);
// Row-wise x / sqrt(|x|^2 + eps) for [N, D].
Tensor l2_normalize(const Tensor& x, double eps = 1e-12);
// [N, D] x [N, D] -> [N].
Tensor rowwise_dot(const Tensor& a, const Tensor& b);

}  // namespace hyperlips::nn

#endif  // HYPERLIPS_NN_OPS_H_
