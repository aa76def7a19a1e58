/* Copyright 2026 The commentclf Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

// Central finite-difference oracle for reverse-mode gradients.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cclf/numerics/ops.hpp"
#include "cclf/numerics/tensor.hpp"

namespace cclf::testing {

using TensorD = Tensor<double>;
using ScalarFn = std::function<TensorD(const std::vector<TensorD>&)>;

inline TensorD random_tensor(Shape shape, std::mt19937_64& rng,
                             double lo = -1.0, double hi = 1.0,
                             bool requires_grad = true) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(numel(shape));
  for (auto& v : data) v = dist(rng);
  return TensorD(std::move(shape), std::move(data), requires_grad);
}

// Wraps an op with a fixed random projection so the scalar depends on every
// output element with a distinct weight.
inline ScalarFn projected(std::function<TensorD(const std::vector<TensorD>&)> op,
                          std::uint64_t seed) {
  return [op = std::move(op), seed](const std::vector<TensorD>& xs) {
    TensorD y = op(xs);
    std::mt19937_64 rng(seed);
    TensorD w = random_tensor(y.shape(), rng, -1.0, 1.0, false);
    return ops::sum(ops::mul(y, w));
  };
}

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// Relative error per input tensor: ||analytic - numeric|| / max(||a||, ||n||,
// floor). The floor keeps exactly-zero gradients (a key bias under softmax)
// from turning finite-difference noise into a large ratio.
inline GradCheckResult grad_check(const ScalarFn& f,
                                  std::vector<TensorD> inputs,
                                  double h = 1e-5, double floor = 1e-12) {
  for (auto& x : inputs) x.zero_grad();
  TensorD loss = f(inputs);
  loss.backward();

  GradCheckResult result;
  for (auto& x : inputs) {
    if (!x.requires_grad()) continue;
    std::vector<double> analytic(x.size(), 0.0);
    if (x.has_grad()) {
      auto g = x.grad();
      std::copy(g.begin(), g.end(), analytic.begin());
    }
    std::vector<double> numeric(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double saved = x.data()[i];
      double plus = 0.0;
      double minus = 0.0;
      {
        NoGradGuard guard;
        x.mutable_data()[i] = saved + h;
        plus = f(inputs).item();
        x.mutable_data()[i] = saved - h;
        minus = f(inputs).item();
      }
      x.mutable_data()[i] = saved;
      numeric[i] = (plus - minus) / (2.0 * h);
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      na += analytic[i] * analytic[i];
      nn += numeric[i] * numeric[i];
    }
    const double denom = std::max({std::sqrt(na), std::sqrt(nn), floor});
    result.max_relative_error =
        std::max(result.max_relative_error, std::sqrt(diff) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace cclf::testing
