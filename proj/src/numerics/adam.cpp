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

#include "cclf/numerics/adam.hpp"

#include <cmath>

#include "cclf/error.hpp"

namespace cclf {

template <typename T>
void adam_step(Tensor<T>& param, AdamState<T>& state) {
  if (!param.has_grad()) {
    throw ContractError("adam_step: parameter has no gradient");
  }
  if (state.m.size() != param.size() || state.v.size() != param.size()) {
    throw ContractError("adam_step: state size does not match parameter");
  }
  state.t += 1;
  const auto& hp = state.hp;
  const double t = static_cast<double>(state.t);
  const T b1 = static_cast<T>(hp.beta1);
  const T b2 = static_cast<T>(hp.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(hp.beta1, t));
  const T correction2 = static_cast<T>(1.0 - std::pow(hp.beta2, t));
  const T lr = static_cast<T>(hp.learning_rate);
  const T eps = static_cast<T>(hp.eps);
  auto p = param.mutable_data();
  const auto g = param.grad();
  for (std::size_t i = 0; i < p.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (T(1) - b1) * g[i];
    state.v[i] = b2 * state.v[i] + (T(1) - b2) * g[i] * g[i];
    const T m_hat = state.m[i] / correction1;
    const T v_hat = state.v[i] / correction2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamHyperparams hp)
    : params_(std::move(params)) {
  states_.reserve(params_.size());
  for (const auto& p : params_) states_.emplace_back(p.size(), hp);
}

template <typename T>
void Adam<T>::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (!p.has_grad()) p.mutable_grad();  // zero-filled
    adam_step(p, states_[i]);
    p.check_finite("adam_step");
  }
  ++steps_;
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template void adam_step(Tensor<float>&, AdamState<float>&);
template void adam_step(Tensor<double>&, AdamState<double>&);
template class Adam<float>;
template class Adam<double>;

}  // namespace cclf
