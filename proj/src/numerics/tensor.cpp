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

#include "cclf/numerics/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "cclf/error.hpp"

namespace cclf {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {
thread_local bool t_grad_enabled = true;
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) {
  t_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad)
    : node_(std::make_shared<detail::Node<T>>()) {
  for (auto d : shape) {
    if (d == 0) {
      throw DimensionError("tensor shape " + shape_string(shape) +
                           " has a zero extent");
    }
  }
  if (numel(shape) != data.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " needs " +
                         std::to_string(numel(shape)) + " elements, got " +
                         std::to_string(data.size()));
  }
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  const auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const auto n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return Tensor(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_string(shape()));
  }
  return node_->data[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<std::size_t> index) const {
  const auto& s = shape();
  if (index.size() != s.size()) {
    throw DimensionError("index rank does not match tensor rank");
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= s[axis]) throw DimensionError("index out of range");
    flat = flat * s[axis] + i;
    ++axis;
  }
  return node_->data[flat];
}

template <typename T>
void Tensor<T>::backward() const {
  if (size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        shape_string(shape()));
  }
  // Iterative post-order DFS gives a topological order of the tape.
  using NodePtr = detail::Node<T>*;
  std::vector<NodePtr> order;
  std::unordered_set<NodePtr> visited;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      NodePtr child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  node_->grad_buffer()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodePtr node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor out(node_->shape, node_->data, node_->requires_grad);
  return out;
}

template <typename T>
void Tensor<T>::check_finite(const std::string& what) const {
  for (std::size_t i = 0; i < node_->data.size(); ++i) {
    if (!std::isfinite(node_->data[i])) {
      throw NumericError(what + ": non-finite value at flat index " +
                         std::to_string(i));
    }
  }
}

namespace detail {

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data,
                      const std::vector<const Tensor<T>*>& inputs,
                      std::function<void(Node<T>&)> backward) {
  Tensor<T> out(std::move(shape), std::move(data));
  if (!grad_enabled()) return out;
  bool any = false;
  for (const auto* in : inputs) any = any || in->requires_grad();
  if (!any) return out;
  auto& node = *out.node();
  node.requires_grad = true;
  node.inputs.reserve(inputs.size());
  for (const auto* in : inputs) node.inputs.push_back(in->node());
  node.backward = std::move(backward);
  return out;
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data,
                      std::initializer_list<const Tensor<T>*> inputs,
                      std::function<void(Node<T>&)> backward) {
  return make_result<T>(std::move(shape), std::move(data),
                        std::vector<const Tensor<T>*>(inputs),
                        std::move(backward));
}

template Tensor<float> make_result(Shape, std::vector<float>,
                                   const std::vector<const Tensor<float>*>&,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>,
                                    const std::vector<const Tensor<double>*>&,
                                    std::function<void(Node<double>&)>);
template Tensor<float> make_result(Shape, std::vector<float>,
                                   std::initializer_list<const Tensor<float>*>,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(
    Shape, std::vector<double>, std::initializer_list<const Tensor<double>*>,
    std::function<void(Node<double>&)>);

}  // namespace detail

template class Tensor<float>;
template class Tensor<double>;

}  // namespace cclf
