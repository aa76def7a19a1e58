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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cclf/numerics/tensor.hpp"

namespace cclf {

struct AdamHyperparams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment estimates for one parameter tensor.
template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::uint64_t t = 0;
  AdamHyperparams hp;

  explicit AdamState(std::size_t size, AdamHyperparams hyper = {})
      : m(size, T(0)), v(size, T(0)), hp(hyper) {}
};

// Bias-corrected Adam update in place. Increments state.t; leaves the
// gradient for the caller to clear. Throws ContractError without a gradient.
template <typename T>
void adam_step(Tensor<T>& param, AdamState<T>& state);

// Adam over a fixed parameter list; counts optimizer steps.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamHyperparams hp);

  // Applies one update to every parameter. Parameters that received no
  // gradient this step are treated as having a zero gradient.
  void step();
  void zero_grad();
  std::uint64_t steps_taken() const { return steps_; }

 private:
  std::vector<Tensor<T>> params_;
  std::vector<AdamState<T>> states_;
  std::uint64_t steps_ = 0;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace cclf
