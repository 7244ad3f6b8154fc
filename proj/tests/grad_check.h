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

// Central finite-difference oracle shared by the unit and acceptance tests.

#ifndef HYPERLIPS_TESTS_GRAD_CHECK_H_
#define HYPERLIPS_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hyperlips/nn/tensor.h"
#include "hyperlips/rng.h"

namespace hyperlips::testing {

struct GradSample {
  double analytic = 0.0;
  double numeric = 0.0;
};

// |a - n| <= rel * max(|a|, |n|) + floor. The floor only matters for
// entries whose true gradient is numerically zero.
inline bool grad_close(const GradSample& s, double rel, double floor = 1e-9) {
  return std::abs(s.analytic - s.numeric) <=
         rel * std::max(std::abs(s.analytic), std::abs(s.numeric)) + floor;
}

inline double numeric_derivative(const std::function<double()>& loss, double& slot,
                                 double eps) {
  const double saved = slot;
  slot = saved + eps;
  const double up = loss();
  slot = saved - eps;
  const double down = loss();
  slot = saved;
  return (up - down) / (2.0 * eps);
}

// Compares analytic gradients of `loss` against central differences for
// `count` random entries drawn across `params` (all entries if count < 0).
inline std::vector<GradSample> check_gradients(const std::function<nn::Tensor()>& loss,
                                               std::vector<nn::Tensor> params, int count,
                                               uint64_t seed, double eps = 1e-6) {
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.zero_grad();
  }
  loss().backward();

  std::vector<std::pair<size_t, size_t>> picks;
  if (count < 0) {
    for (size_t k = 0; k < params.size(); ++k)
      for (size_t i = 0; i < static_cast<size_t>(params[k].numel()); ++i) picks.emplace_back(k, i);
  } else {
    Rng rng(seed);
    int64_t total = 0;
    for (auto& p : params) total += p.numel();
    for (int c = 0; c < count; ++c) {
      int64_t flat = rng.randint(0, total);
      size_t k = 0;
      while (flat >= params[k].numel()) flat -= params[k++].numel();
      picks.emplace_back(k, static_cast<size_t>(flat));
    }
  }

  const auto value = [&] {
    nn::NoGradGuard no_grad;
    return loss().item();
  };
  std::vector<GradSample> out;
  for (auto [k, i] : picks) {
    GradSample s;
    s.analytic = params[k].grad()[i];
    s.numeric = numeric_derivative(value, params[k].data()[i], eps);
    out.push_back(s);
  }
  return out;
}

inline nn::Tensor random_tensor(nn::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace hyperlips::testing

#endif  // HYPERLIPS_TESTS_GRAD_CHECK_H_
