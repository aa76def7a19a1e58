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

#include "cclf/hsum.hpp"

#include "cclf/error.hpp"
#include "cclf/numerics/ops.hpp"
#include "cclf/numerics/random.hpp"

namespace cclf {

template <typename T>
std::vector<int> predict_labels(const Tensor<T>& logits) {
  if (logits.rank() != 2 || logits.dim(1) != kNumClasses) {
    throw DimensionError("predict_labels expects [B x 2] logits, got " +
                         shape_string(logits.shape()));
  }
  std::vector<int> out(logits.dim(0));
  const auto z = logits.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = z[i * 2 + 1] > z[i * 2] ? 1 : 0;
  }
  return out;
}

template std::vector<int> predict_labels(const Tensor<float>&);
template std::vector<int> predict_labels(const Tensor<double>&);

template <typename T>
HsumHead<T>::HsumHead(const EncoderConfig& encoder, std::size_t depth,
                      std::uint64_t seed) {
  if (depth == 0 || depth > encoder.n_layers) {
    throw ConfigError("HSUM depth " + std::to_string(depth) +
                      " must be in [1, " + std::to_string(encoder.n_layers) +
                      "]");
  }
  std::mt19937_64 rng(mix64(seed, 0x6873756dULL));
  for (std::size_t i = 0; i < depth; ++i) {
    blocks_.emplace_back(encoder.d_model, encoder.n_heads, encoder.d_ff, rng);
  }
  for (std::size_t i = 0; i < depth; ++i) {
    head_weights_.push_back(init_normal<T>({encoder.d_model, kNumClasses}, rng));
    head_biases_.push_back(Tensor<T>::zeros({kNumClasses}, true));
  }
}

template <typename T>
std::vector<Tensor<T>> HsumHead<T>::aggregate(
    const std::vector<Tensor<T>>& hiddens, const TokenBatch& batch,
    DropoutStream& dropout) const {
  if (hiddens.size() < 2) {
    throw ContractError("HSUM needs at least one encoder layer of hiddens");
  }
  const std::size_t top = hiddens.size() - 1;
  if (depth() > top) {
    throw ConfigError("HSUM depth " + std::to_string(depth()) +
                      " exceeds encoder depth " + std::to_string(top));
  }
  std::vector<Tensor<T>> levels;
  levels.reserve(depth());
  Tensor<T> running = hiddens[top];
  for (std::size_t i = 0; i < depth(); ++i) {
    if (i > 0) running = ops::add(levels.back(), hiddens[top - i]);
    levels.push_back(identity_blocks_
                         ? running
                         : blocks_[i].forward(running, batch, dropout));
  }
  return levels;
}

template <typename T>
typename HsumHead<T>::Logits HsumHead<T>::classify(
    const std::vector<Tensor<T>>& aggregated) const {
  if (aggregated.size() != depth()) {
    throw ContractError("HSUM classify expects " + std::to_string(depth()) +
                        " aggregated levels, got " +
                        std::to_string(aggregated.size()));
  }
  Logits out;
  for (std::size_t i = 0; i < depth(); ++i) {
    out.per_level.push_back(ops::linear(ops::select_position(aggregated[i], 0),
                                        head_weights_[i], head_biases_[i]));
  }
  out.final = depth() == 1 ? out.per_level.front() : ops::mean_of(out.per_level);
  return out;
}

template <typename T>
Tensor<T> HsumHead<T>::loss(const std::vector<Tensor<T>>& per_level_logits,
                            std::span<const int> labels) {
  if (per_level_logits.empty()) throw ContractError("HSUM loss: no levels");
  if (per_level_logits.size() == 1) {
    return ops::cross_entropy_logits(per_level_logits.front(), labels);
  }
  std::vector<Tensor<T>> losses;
  losses.reserve(per_level_logits.size());
  for (const auto& z : per_level_logits) {
    losses.push_back(ops::cross_entropy_logits(z, labels));
  }
  return ops::mean_of(losses);
}

template <typename T>
ParameterList<T> HsumHead<T>::parameters() const {
  ParameterList<T> out;
  for (std::size_t i = 0; i < depth(); ++i) {
    blocks_[i].collect("hsum.block" + std::to_string(i) + ".", out);
  }
  for (std::size_t i = 0; i < depth(); ++i) {
    out.push_back({"hsum.head" + std::to_string(i) + ".weight", head_weights_[i]});
    out.push_back({"hsum.head" + std::to_string(i) + ".bias", head_biases_[i]});
  }
  return out;
}

template <typename T>
HsumHead<T> HsumHead<T>::clone() const {
  HsumHead copy;
  for (const auto& b : blocks_) copy.blocks_.push_back(b.clone());
  for (const auto& w : head_weights_) copy.head_weights_.push_back(w.clone());
  for (const auto& b : head_biases_) copy.head_biases_.push_back(b.clone());
  copy.identity_blocks_ = identity_blocks_;
  return copy;
}

template <typename T>
BaselineHead<T>::BaselineHead(const EncoderConfig& encoder, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed, 0x62617365ULL));
  weight_ = init_normal<T>({encoder.d_model, kNumClasses}, rng);
  bias_ = Tensor<T>::zeros({kNumClasses}, true);
}

template <typename T>
Tensor<T> BaselineHead<T>::forward(const std::vector<Tensor<T>>& hiddens) const {
  if (hiddens.empty()) throw ContractError("baseline head: no hidden states");
  return ops::linear(ops::select_position(hiddens.back(), 0), weight_, bias_);
}

template <typename T>
ParameterList<T> BaselineHead<T>::parameters() const {
  return {{"baseline.weight", weight_}, {"baseline.bias", bias_}};
}

template <typename T>
BaselineHead<T> BaselineHead<T>::clone() const {
  BaselineHead copy;
  copy.weight_ = weight_.clone();
  copy.bias_ = bias_.clone();
  return copy;
}

template class HsumHead<float>;
template class HsumHead<double>;
template class BaselineHead<float>;
template class BaselineHead<double>;

}  // namespace cclf
