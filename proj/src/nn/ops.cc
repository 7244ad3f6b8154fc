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

#include "hyperlips/nn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperlips/error.h"

namespace hyperlips::nn {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;
using StridedMapR = Eigen::Map<MatR, 0, Eigen::OuterStride<>>;

// Output pixels per im2col band in the convolution forward pass.
constexpr int64_t kConvBandPixels = 16384;

using detail::Node;

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), ErrorCode::kShapeMismatch,
          std::string(op) + ": " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

void check_rank(const Tensor& x, int rank, const char* op) {
  require(x.rank() == rank, ErrorCode::kShapeMismatch,
          std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
              shape_str(x.shape()));
}

// Grad buffer of input k, or nullptr when that input does not need one.
double* input_grad(Node& self, size_t k) {
  Node& in = *self.inputs[k];
  if (!in.requires_grad) return nullptr;
  in.ensure_grad();
  return in.grad.data();
}

template <class F, class DF>
Tensor unary(const Tensor& x, F f, DF df) {
  auto xs = x.data();
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return make_result(x.shape(), std::move(out), {x}, [df](Node& self) {
    double* gx = input_grad(self, 0);
    if (!gx) return;
    const auto& xv = self.inputs[0]->value;
    for (size_t i = 0; i < xv.size(); ++i) gx[i] += self.grad[i] * df(xv[i], self.value[i]);
  });
}

// Geometry of a square-kernel 2-D convolution from (N, C, H, W) to
// (N, *, Ho, Wo); columns are laid out as [C * k * k, N * Ho * Wo].
struct ConvGeom {
  int64_t n, c, h, w, k, stride, pad, ho, wo;
  int64_t plane() const { return ho * wo; }
  int64_t rows() const { return c * k * k; }
  int64_t cols() const { return n * ho * wo; }
};

ConvGeom make_geom(int64_t n, int64_t c, int64_t h, int64_t w, int64_t k, int64_t stride,
                   int64_t pad) {
  ConvGeom g{n, c, h, w, k, stride, pad, 0, 0};
  g.ho = (h + 2 * pad - k) / stride + 1;
  g.wo = (w + 2 * pad - k) / stride + 1;
  require(g.ho > 0 && g.wo > 0, ErrorCode::kShapeMismatch, "convolution output is empty");
  return g;
}

void im2col(const double* x, const ConvGeom& g, double* col) {
  const int64_t cols = g.cols();
  for (int64_t c = 0; c < g.c; ++c) {
    for (int64_t ki = 0; ki < g.k; ++ki) {
      for (int64_t kj = 0; kj < g.k; ++kj) {
        double* dst = col + ((c * g.k + ki) * g.k + kj) * cols;
        for (int64_t n = 0; n < g.n; ++n) {
          const double* src = x + (n * g.c + c) * g.h * g.w;
          for (int64_t oy = 0; oy < g.ho; ++oy) {
            const int64_t iy = oy * g.stride - g.pad + ki;
            double* row = dst + n * g.plane() + oy * g.wo;
            if (iy < 0 || iy >= g.h) {
              std::fill(row, row + g.wo, 0.0);
              continue;
            }
            for (int64_t ox = 0; ox < g.wo; ++ox) {
              const int64_t ix = ox * g.stride - g.pad + kj;
              row[ox] = (ix >= 0 && ix < g.w) ? src[iy * g.w + ix] : 0.0;
            }
          }
        }
      }
    }
  }
}

// im2col of output rows [oy0, oy1) of a single image into [C * k * k, rows * Wo].
void im2col_rows(const double* x, const ConvGeom& g, int64_t oy0, int64_t oy1, double* col) {
  const int64_t cols = (oy1 - oy0) * g.wo;
  for (int64_t c = 0; c < g.c; ++c) {
    const double* src = x + c * g.h * g.w;
    for (int64_t ki = 0; ki < g.k; ++ki) {
      for (int64_t kj = 0; kj < g.k; ++kj) {
        double* dst = col + ((c * g.k + ki) * g.k + kj) * cols;
        for (int64_t oy = oy0; oy < oy1; ++oy) {
          const int64_t iy = oy * g.stride - g.pad + ki;
          double* row = dst + (oy - oy0) * g.wo;
          if (iy < 0 || iy >= g.h) {
            std::fill(row, row + g.wo, 0.0);
            continue;
          }
          for (int64_t ox = 0; ox < g.wo; ++ox) {
            const int64_t ix = ox * g.stride - g.pad + kj;
            row[ox] = (ix >= 0 && ix < g.w) ? src[iy * g.w + ix] : 0.0;
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-and-adds columns back into an image buffer.
void col2im(const double* col, const ConvGeom& g, double* x) {
  const int64_t cols = g.cols();
  for (int64_t c = 0; c < g.c; ++c) {
    for (int64_t ki = 0; ki < g.k; ++ki) {
      for (int64_t kj = 0; kj < g.k; ++kj) {
        const double* src = col + ((c * g.k + ki) * g.k + kj) * cols;
        for (int64_t n = 0; n < g.n; ++n) {
          double* dst = x + (n * g.c + c) * g.h * g.w;
          for (int64_t oy = 0; oy < g.ho; ++oy) {
            const int64_t iy = oy * g.stride - g.pad + ki;
            if (iy < 0 || iy >= g.h) continue;
            const double* row = src + n * g.plane() + oy * g.wo;
            for (int64_t ox = 0; ox < g.wo; ++ox) {
              const int64_t ix = ox * g.stride - g.pad + kj;
              if (ix >= 0 && ix < g.w) dst[iy * g.w + ix] += row[ox];
            }
          }
        }
      }
    }
  }
}

// NCHW <-> [C, N * P] channel-major layout used around the GEMMs.
void nchw_to_cm(const double* x, int64_t n, int64_t c, int64_t p, double* out) {
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < c; ++j)
      std::copy_n(x + (i * c + j) * p, p, out + j * n * p + i * p);
}

void cm_to_nchw(const double* cm, int64_t n, int64_t c, int64_t p, double* out) {
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < c; ++j)
      std::copy_n(cm + j * n * p + i * p, p, out + (i * c + j) * p);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.data().begin(), a.data().end());
  auto bs = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bs[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (size_t k = 0; k < 2; ++k) {
      if (double* g = input_grad(self, k)) {
        for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> out(a.data().begin(), a.data().end());
  auto bs = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bs[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (double* g = input_grad(self, 0))
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    if (double* g = input_grad(self, 1))
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  auto as = a.data();
  auto bs = b.data();
  std::vector<double> out(as.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = as[i] * bs[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& av = self.inputs[0]->value;
    const auto& bv = self.inputs[1]->value;
    if (double* g = input_grad(self, 0))
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
    if (double* g = input_grad(self, 1))
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
  });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary(
      x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Tensor relu(const Tensor& x) { return leaky_relu(x, 0.0); }

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& x) {
  return unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor abs(const Tensor& x) {
  return unary(
      x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor square(const Tensor& x) {
  return unary(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  return unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& x) {
  auto xs = x.data();
  const double total = std::accumulate(xs.begin(), xs.end(), 0.0);
  return make_result(Shape{}, {total}, {x}, [](Node& self) {
    if (double* g = input_grad(self, 0)) {
      const size_t n = self.inputs[0]->value.size();
      for (size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  require(x.numel() > 0, ErrorCode::kShapeMismatch, "mean of empty tensor");
  return mul_scalar(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor mean_per_sample(const Tensor& x) {
  require(x.rank() >= 1 && x.dim(0) > 0, ErrorCode::kShapeMismatch, "mean_per_sample");
  const int64_t n = x.dim(0);
  const int64_t m = x.numel() / n;
  auto xs = x.data();
  std::vector<double> out(n);
  for (int64_t i = 0; i < n; ++i) {
    out[i] = std::accumulate(xs.begin() + i * m, xs.begin() + (i + 1) * m, 0.0) /
             static_cast<double>(m);
  }
  return make_result(Shape{n}, std::move(out), {x}, [n, m](Node& self) {
    if (double* g = input_grad(self, 0)) {
      for (int64_t i = 0; i < n; ++i) {
        const double gi = self.grad[i] / static_cast<double>(m);
        for (int64_t j = 0; j < m; ++j) g[i * m + j] += gi;
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  require(shape_numel(shape) == x.numel(), ErrorCode::kShapeMismatch,
          "reshape " + shape_str(x.shape()) + " -> " + shape_str(shape));
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {x}, [](Node& self) {
    if (double* g = input_grad(self, 0))
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  require(!parts.empty(), ErrorCode::kShapeMismatch, "concat of nothing");
  const int rank = parts[0].rank();
  const int a = axis < 0 ? axis + rank : axis;
  require(a >= 0 && a < rank, ErrorCode::kShapeMismatch, "concat axis out of range");
  Shape out_shape = parts[0].shape();
  out_shape[a] = 0;
  std::vector<int64_t> widths;
  for (const auto& p : parts) {
    require(p.rank() == rank, ErrorCode::kShapeMismatch, "concat rank mismatch");
    for (int d = 0; d < rank; ++d) {
      if (d != a) {
        require(p.shape()[d] == parts[0].shape()[d], ErrorCode::kShapeMismatch,
                "concat: " + shape_str(p.shape()) + " vs " + shape_str(parts[0].shape()));
      }
    }
    out_shape[a] += p.shape()[a];
  }
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < a; ++d) outer *= out_shape[d];
  for (int d = a + 1; d < rank; ++d) inner *= out_shape[d];
  for (const auto& p : parts) widths.push_back(p.shape()[a] * inner);
  const int64_t row = out_shape[a] * inner;

  std::vector<double> out(static_cast<size_t>(shape_numel(out_shape)));
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    auto src = parts[k].data();
    for (int64_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * widths[k], widths[k], out.begin() + o * row + offset);
    }
    offset += widths[k];
  }
  return make_result(std::move(out_shape), std::move(out), parts,
                     [widths, outer, row](Node& self) {
                       int64_t off = 0;
                       for (size_t k = 0; k < widths.size(); ++k) {
                         if (double* g = input_grad(self, k)) {
                           for (int64_t o = 0; o < outer; ++o)
                             for (int64_t j = 0; j < widths[k]; ++j)
                               g[o * widths[k] + j] += self.grad[o * row + off + j];
                         }
                         off += widths[k];
                       }
                     });
}

Tensor slice(const Tensor& x, int axis, int64_t begin, int64_t end) {
  const int rank = x.rank();
  const int a = axis < 0 ? axis + rank : axis;
  require(a >= 0 && a < rank, ErrorCode::kShapeMismatch, "slice axis out of range");
  require(0 <= begin && begin < end && end <= x.shape()[a], ErrorCode::kShapeMismatch,
          "slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") of " +
              shape_str(x.shape()));
  Shape out_shape = x.shape();
  out_shape[a] = end - begin;
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < a; ++d) outer *= out_shape[d];
  for (int d = a + 1; d < rank; ++d) inner *= out_shape[d];
  const int64_t in_row = x.shape()[a] * inner;
  const int64_t out_row = (end - begin) * inner;
  const int64_t off = begin * inner;
  auto xs = x.data();
  std::vector<double> out(static_cast<size_t>(outer * out_row));
  for (int64_t o = 0; o < outer; ++o) {
    std::copy_n(xs.begin() + o * in_row + off, out_row, out.begin() + o * out_row);
  }
  return make_result(std::move(out_shape), std::move(out), {x},
                     [outer, in_row, out_row, off](Node& self) {
                       if (double* g = input_grad(self, 0)) {
                         for (int64_t o = 0; o < outer; ++o)
                           for (int64_t j = 0; j < out_row; ++j)
                             g[o * in_row + off + j] += self.grad[o * out_row + j];
                       }
                     });
}

namespace {

// Plain loops keep the summation order independent of buffer alignment.
void add_row_sums(const double* m, int64_t rows, int64_t cols, double* out) {
  for (int64_t r = 0; r < rows; ++r) {
    double acc = 0;
    for (int64_t c = 0; c < cols; ++c) acc += m[r * cols + c];
    out[r] += acc;
  }
}

void add_col_sums(const double* m, int64_t rows, int64_t cols, double* out) {
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c) out[c] += m[r * cols + c];
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  check_rank(x, 2, "linear");
  check_rank(weight, 2, "linear weight");
  const int64_t n = x.dim(0), in = x.dim(1), out = weight.dim(0);
  require(weight.dim(1) == in, ErrorCode::kShapeMismatch,
          "linear: input " + shape_str(x.shape()) + " vs weight " + shape_str(weight.shape()));
  if (bias.defined()) {
    require(bias.numel() == out, ErrorCode::kShapeMismatch, "linear bias size");
  }
  std::vector<double> y(static_cast<size_t>(n * out));
  MapR ym(y.data(), n, out);
  ym.noalias() = CMapR(x.data().data(), n, in) * CMapR(weight.data().data(), out, in).transpose();
  if (bias.defined()) {
    ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.data().data(), out);
  }
  return make_result(Shape{n, out}, std::move(y), {x, weight, bias},
                     [n, in, out](Node& self) {
                       CMapR gy(self.grad.data(), n, out);
                       if (double* gx = input_grad(self, 0)) {
                         MapR(gx, n, in).noalias() +=
                             gy * CMapR(self.inputs[1]->value.data(), out, in);
                       }
                       if (double* gw = input_grad(self, 1)) {
                         MapR(gw, out, in).noalias() +=
                             gy.transpose() * CMapR(self.inputs[0]->value.data(), n, in);
                       }
                       if (double* gb = input_grad(self, 2)) {
                         add_col_sums(self.grad.data(), n, out, gb);
                       }
                     });
}

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, int stride,
              int padding) {
  check_rank(x, 4, "conv2d");
  check_rank(weight, 4, "conv2d weight");
  const int64_t cout = weight.dim(0), k = weight.dim(2);
  require(weight.dim(1) == x.dim(1) && weight.dim(3) == k, ErrorCode::kShapeMismatch,
          "conv2d: input " + shape_str(x.shape()) + " vs weight " + shape_str(weight.shape()));
  if (bias.defined()) require(bias.numel() == cout, ErrorCode::kShapeMismatch, "conv2d bias");
  const ConvGeom g = make_geom(x.dim(0), x.dim(1), x.dim(2), x.dim(3), k, stride, padding);

  // Bands of output rows keep the column buffer small for large images.
  const int64_t band = std::max<int64_t>(1, kConvBandPixels / g.wo);
  std::vector<double> col(static_cast<size_t>(g.rows() * std::min(band, g.ho) * g.wo));
  std::vector<double> y(static_cast<size_t>(g.n * cout * g.plane()));
  const CMapR wm(weight.data().data(), cout, g.rows());
  for (int64_t i = 0; i < g.n; ++i) {
    const double* xi = x.data().data() + i * g.c * g.h * g.w;
    for (int64_t oy0 = 0; oy0 < g.ho; oy0 += band) {
      const int64_t oy1 = std::min(g.ho, oy0 + band), cols = (oy1 - oy0) * g.wo;
      im2col_rows(xi, g, oy0, oy1, col.data());
      StridedMapR yb(y.data() + (i * cout * g.ho + oy0) * g.wo, cout, cols,
                     Eigen::OuterStride<>(g.plane()));
      yb.noalias() = wm * CMapR(col.data(), g.rows(), cols);
      if (bias.defined()) {
        yb.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.data().data(), cout);
      }
    }
  }

  return make_result(Shape{g.n, cout, g.ho, g.wo}, std::move(y), {x, weight, bias},
                     [g, cout](Node& self) {
                       MatR gcm(cout, g.cols());
                       nchw_to_cm(self.grad.data(), g.n, cout, g.plane(), gcm.data());
                       double* gx = input_grad(self, 0);
                       double* gw = input_grad(self, 1);
                       if (gw) {
                         std::vector<double> col(static_cast<size_t>(g.rows() * g.cols()));
                         im2col(self.inputs[0]->value.data(), g, col.data());
                         MapR(gw, cout, g.rows()).noalias() +=
                             gcm * CMapR(col.data(), g.rows(), g.cols()).transpose();
                       }
                       if (gx) {
                         MatR dcol =
                             CMapR(self.inputs[1]->value.data(), cout, g.rows()).transpose() *
                             gcm;
                         col2im(dcol.data(), g, gx);
                       }
                       if (double* gb = input_grad(self, 2)) {
                         add_row_sums(gcm.data(), cout, g.cols(), gb);
                       }
                     });
}

Tensor conv_transpose2d(const Tensor& x, const Tensor& weight, const Tensor& bias, int stride,
                        int padding) {
  check_rank(x, 4, "conv_transpose2d");
  check_rank(weight, 4, "conv_transpose2d weight");
  const int64_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int64_t cout = weight.dim(1), k = weight.dim(2);
  require(weight.dim(0) == cin && weight.dim(3) == k, ErrorCode::kShapeMismatch,
          "conv_transpose2d: input " + shape_str(x.shape()) + " vs weight " +
              shape_str(weight.shape()));
  if (bias.defined()) {
    require(bias.numel() == cout, ErrorCode::kShapeMismatch, "conv_transpose2d bias");
  }
  const int64_t ho = (h - 1) * stride - 2 * padding + k;
  const int64_t wo = (w - 1) * stride - 2 * padding + k;
  require(ho > 0 && wo > 0, ErrorCode::kShapeMismatch, "conv_transpose2d output is empty");
  // The adjoint convolution maps (Cout, ho, wo) back onto (Cin, h, w).
  const ConvGeom g = make_geom(n, cout, ho, wo, k, stride, padding);
  require(g.ho == h && g.wo == w, ErrorCode::kShapeMismatch, "conv_transpose2d geometry");
  const int64_t p = h * w;

  MatR xcm(cin, n * p);
  nchw_to_cm(x.data().data(), n, cin, p, xcm.data());
  MatR col = CMapR(weight.data().data(), cin, g.rows()).transpose() * xcm;
  std::vector<double> y(static_cast<size_t>(n * cout * ho * wo), 0.0);
  col2im(col.data(), g, y.data());
  if (bias.defined()) {
    auto bs = bias.data();
    for (int64_t i = 0; i < n; ++i)
      for (int64_t c = 0; c < cout; ++c) {
        double* plane = y.data() + (i * cout + c) * ho * wo;
        for (int64_t j = 0; j < ho * wo; ++j) plane[j] += bs[c];
      }
  }
  return make_result(
      Shape{n, cout, ho, wo}, std::move(y), {x, weight, bias},
      [g, n, cin, cout, p](Node& self) {
        double* gx = input_grad(self, 0);
        double* gw = input_grad(self, 1);
        if (gx || gw) {
          std::vector<double> dcol(static_cast<size_t>(g.rows() * g.cols()));
          im2col(self.grad.data(), g, dcol.data());
          CMapR dc(dcol.data(), g.rows(), g.cols());
          if (gx) {
            MatR gxcm = CMapR(self.inputs[1]->value.data(), cin, g.rows()) * dc;
            std::vector<double> tmp(static_cast<size_t>(n * cin * p));
            cm_to_nchw(gxcm.data(), n, cin, p, tmp.data());
            for (size_t i = 0; i < tmp.size(); ++i) gx[i] += tmp[i];
          }
          if (gw) {
            MatR xcm(cin, n * p);
            nchw_to_cm(self.inputs[0]->value.data(), n, cin, p, xcm.data());
            MapR(gw, cin, g.rows()).noalias() += xcm * dc.transpose();
          }
        }
        if (double* gb = input_grad(self, 2)) {
          const int64_t plane = g.h * g.w;
          for (int64_t i = 0; i < n; ++i)
            for (int64_t c = 0; c < cout; ++c) {
              const double* src = self.grad.data() + (i * cout + c) * plane;
              gb[c] += std::accumulate(src, src + plane, 0.0);
            }
        }
      });
}

Tensor sample_conv2d(const Tensor& x, const Tensor& kernels, const Tensor& biases,
                     int kernel_size) {
  check_rank(x, 4, "sample_conv2d");
  require(kernel_size >= 1 && kernel_size % 2 == 1, ErrorCode::kWeightShapeMismatch,
          "kernel size must be odd");
  const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int64_t k = kernel_size;
  const int64_t ckk = c * k * k;
  require(kernels.rank() == 2 && kernels.dim(0) == n && kernels.dim(1) % ckk == 0,
          ErrorCode::kWeightShapeMismatch,
          "kernels " + shape_str(kernels.shape()) + " do not fit input " + shape_str(x.shape()));
  const int64_t cout = kernels.dim(1) / ckk;
  require(biases.rank() == 2 && biases.dim(0) == n && biases.dim(1) == cout,
          ErrorCode::kWeightShapeMismatch,
          "biases " + shape_str(biases.shape()) + " do not fit " + std::to_string(cout) +
              " output channels");
  const ConvGeom g = make_geom(1, c, h, w, k, 1, k / 2);
  const int64_t p = h * w;

  std::vector<double> y(static_cast<size_t>(n * cout * p));
  std::vector<double> col(static_cast<size_t>(ckk * p));
  for (int64_t i = 0; i < n; ++i) {
    const double* xi = x.data().data() + i * c * p;
    const double* colp = xi;
    if (k > 1) {
      im2col(xi, g, col.data());
      colp = col.data();
    }
    MapR yi(y.data() + i * cout * p, cout, p);
    yi.noalias() = CMapR(kernels.data().data() + i * cout * ckk, cout, ckk) * CMapR(colp, ckk, p);
    yi.colwise() += Eigen::Map<const Eigen::VectorXd>(biases.data().data() + i * cout, cout);
  }
  return make_result(
      Shape{n, cout, h, w}, std::move(y), {x, kernels, biases},
      [g, n, c, cout, ckk, p, k](Node& self) {
        double* gx = input_grad(self, 0);
        double* gk = input_grad(self, 1);
        double* gb = input_grad(self, 2);
        std::vector<double> col(static_cast<size_t>(ckk * p));
        for (int64_t i = 0; i < n; ++i) {
          CMapR gy(self.grad.data() + i * cout * p, cout, p);
          const double* xi = self.inputs[0]->value.data() + i * c * p;
          if (gk) {
            const double* colp = xi;
            if (k > 1) {
              im2col(xi, g, col.data());
              colp = col.data();
            }
            MapR(gk + i * cout * ckk, cout, ckk).noalias() += gy * CMapR(colp, ckk, p).transpose();
          }
          if (gx) {
            MatR dcol =
                CMapR(self.inputs[1]->value.data() + i * cout * ckk, cout, ckk).transpose() * gy;
            if (k > 1) {
              col2im(dcol.data(), g, gx + i * c * p);
            } else {
              MapR(gx + i * c * p, c, p) += dcol;
            }
          }
          if (gb) add_row_sums(self.grad.data() + i * cout * p, cout, p, gb + i * cout);
        }
      });
}

Tensor global_avg_pool(const Tensor& x) {
  check_rank(x, 4, "global_avg_pool");
  const int64_t n = x.dim(0), c = x.dim(1), p = x.dim(2) * x.dim(3);
  auto xs = x.data();
  std::vector<double> out(static_cast<size_t>(n * c));
  for (int64_t i = 0; i < n * c; ++i) {
    out[i] = std::accumulate(xs.begin() + i * p, xs.begin() + (i + 1) * p, 0.0) /
             static_cast<double>(p);
  }
  return make_result(Shape{n, c}, std::move(out), {x}, [n, c, p](Node& self) {
    if (double* g = input_grad(self, 0)) {
      for (int64_t i = 0; i < n * c; ++i) {
        const double gi = self.grad[i] / static_cast<double>(p);
        for (int64_t j = 0; j < p; ++j) g[i * p + j] += gi;
      }
    }
  });
}

Tensor avg_pool2(const Tensor& x) {
  check_rank(x, 4, "avg_pool2");
  const int64_t nc = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  const int64_t ho = (h + 1) / 2, wo = (w + 1) / 2;
  auto xs = x.data();
  std::vector<double> out(static_cast<size_t>(nc * ho * wo));
  for (int64_t i = 0; i < nc; ++i) {
    for (int64_t oy = 0; oy < ho; ++oy) {
      for (int64_t ox = 0; ox < wo; ++ox) {
        double s = 0.0;
        int cnt = 0;
        for (int64_t dy = 0; dy < 2; ++dy)
          for (int64_t dx = 0; dx < 2; ++dx) {
            const int64_t iy = 2 * oy + dy, ix = 2 * ox + dx;
            if (iy < h && ix < w) {
              s += xs[(i * h + iy) * w + ix];
              ++cnt;
            }
          }
        out[(i * ho + oy) * wo + ox] = s / cnt;
      }
    }
  }
  return make_result(Shape{x.dim(0), x.dim(1), ho, wo}, std::move(out), {x},
                     [nc, h, w, ho, wo](Node& self) {
                       double* g = input_grad(self, 0);
                       if (!g) return;
                       for (int64_t i = 0; i < nc; ++i)
                         for (int64_t oy = 0; oy < ho; ++oy)
                           for (int64_t ox = 0; ox < wo; ++ox) {
                             const int64_t cy = std::min<int64_t>(2, h - 2 * oy);
                             const int64_t cx = std::min<int64_t>(2, w - 2 * ox);
                             const double go = self.grad[(i * ho + oy) * wo + ox] / (cy * cx);
                             for (int64_t dy = 0; dy < cy; ++dy)
                               for (int64_t dx = 0; dx < cx; ++dx)
                                 g[(i * h + 2 * oy + dy) * w + 2 * ox + dx] += go;
                           }
                     });
}

Tensor channel_normalize(const Tensor& x, double eps) {
  check_rank(x, 4, "channel_normalize");
  const int64_t n = x.dim(0), c = x.dim(1), p = x.dim(2) * x.dim(3);
  auto xs = x.data();
  std::vector<double> out(xs.size());
  std::vector<double> norms(static_cast<size_t>(n * p));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < p; ++j) {
      double ss = 0.0;
      for (int64_t ch = 0; ch < c; ++ch) ss += xs[(i * c + ch) * p + j] * xs[(i * c + ch) * p + j];
      const double norm = std::sqrt(ss);
      norms[i * p + j] = norm;
      for (int64_t ch = 0; ch < c; ++ch)
        out[(i * c + ch) * p + j] = xs[(i * c + ch) * p + j] / (norm + eps);
    }
  }
  return make_result(x.shape(), std::move(out), {x},
                     [n, c, p, eps, norms = std::move(norms)](Node& self) {
                       double* g = input_grad(self, 0);
                       if (!g) return;
                       const auto& xv = self.inputs[0]->value;
                       for (int64_t i = 0; i < n; ++i) {
                         for (int64_t j = 0; j < p; ++j) {
                           const double norm = norms[i * p + j];
                           const double s = norm + eps;
                           double gdotx = 0.0;
                           for (int64_t ch = 0; ch < c; ++ch) {
                             const int64_t idx = (i * c + ch) * p + j;
                             gdotx += self.grad[idx] * xv[idx];
                           }
                           const double coef = norm > 0.0 ? gdotx / (s * s * norm) : 0.0;
                           for (int64_t ch = 0; ch < c; ++ch) {
                             const int64_t idx = (i * c + ch) * p + j;
                             g[idx] += self.grad[idx] / s - coef * xv[idx];
                           }
                         }
                       }
                     });
}

Tensor l2_normalize(const Tensor& x, double eps) {
  check_rank(x, 2, "l2_normalize");
  const int64_t n = x.dim(0), d = x.dim(1);
  auto xs = x.data();
  std::vector<double> out(xs.size());
  std::vector<double> radii(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double ss = eps;
    for (int64_t j = 0; j < d; ++j) ss += xs[i * d + j] * xs[i * d + j];
    radii[i] = std::sqrt(ss);
    for (int64_t j = 0; j < d; ++j) out[i * d + j] = xs[i * d + j] / radii[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [n, d, radii = std::move(radii)](Node& self) {
    double* g = input_grad(self, 0);
    if (!g) return;
    const auto& xv = self.inputs[0]->value;
    for (int64_t i = 0; i < n; ++i) {
      const double r = radii[i];
      double gdotx = 0.0;
      for (int64_t j = 0; j < d; ++j) gdotx += self.grad[i * d + j] * xv[i * d + j];
      for (int64_t j = 0; j < d; ++j)
        g[i * d + j] += self.grad[i * d + j] / r - gdotx * xv[i * d + j] / (r * r * r);
    }
  });
}

Tensor rowwise_dot(const Tensor& a, const Tensor& b) {
  check_rank(a, 2, "rowwise_dot");
  check_same_shape(a, b, "rowwise_dot");
  const int64_t n = a.dim(0), d = a.dim(1);
  auto as = a.data();
  auto bs = b.data();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < d; ++j) out[i] += as[i * d + j] * bs[i * d + j];
  return make_result(Shape{n}, std::move(out), {a, b}, [n, d](Node& self) {
    const auto& av = self.inputs[0]->value;
    const auto& bv = self.inputs[1]->value;
    if (double* g = input_grad(self, 0))
      for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < d; ++j) g[i * d + j] += self.grad[i] * bv[i * d + j];
    if (double* g = input_grad(self, 1))
      for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < d; ++j) g[i * d + j] += self.grad[i] * av[i * d + j];
  });
}

}  // namespace hyperlips::nn
