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

// Hierarchical aggregation of the top-k encoder layers.
//
//   A_1 = Block_1(H^L)
//   A_i = Block_i(A_{i-1} + H^{L-i+1}),  i = 2..k
//
// Each level has its own classifier on the CLS position. Training averages
// the per-level cross entropies; inference averages the per-level logits.

#include <cstdint>
#include <span>
#include <vector>

#include "cclf/encoder.hpp"

namespace cclf {

inline constexpr std::size_t kNumClasses = 2;

// Argmax per row of [B x 2] logits; ties go to label 0.
template <typename T>
std::vector<int> predict_labels(const Tensor<T>& logits);

template <typename T>
class HsumHead {
 public:
  struct Logits {
    std::vector<Tensor<T>> per_level;
    Tensor<T> final;
  };

  // Throws ConfigError unless 1 <= depth <= encoder.n_layers.
  HsumHead(const EncoderConfig& encoder, std::size_t depth, std::uint64_t seed);

  std::size_t depth() const { return blocks_.size(); }
  const EncoderLayer<T>& block(std::size_t level) const {
    return blocks_.at(level);
  }

  // hiddens holds L+1 states; consumes H^L down to H^{L-k+1}.
  std::vector<Tensor<T>> aggregate(const std::vector<Tensor<T>>& hiddens,
                                   const TokenBatch& batch,
                                   DropoutStream& dropout) const;

  Logits classify(const std::vector<Tensor<T>>& aggregated) const;

  // Mean over levels of cross_entropy_logits(level, labels).
  static Tensor<T> loss(const std::vector<Tensor<T>>& per_level_logits,
                        std::span<const int> labels);

  // Test hook: when set, every Block_i is the identity map.
  void set_identity_blocks(bool enabled) { identity_blocks_ = enabled; }

  ParameterList<T> parameters() const;
  HsumHead clone() const;

 private:
  HsumHead() = default;

  std::vector<EncoderLayer<T>> blocks_;
  std::vector<Tensor<T>> head_weights_;  // [d x 2]
  std::vector<Tensor<T>> head_biases_;   // [2]
  bool identity_blocks_ = false;
};

// Linear classifier over the top layer's CLS state.
template <typename T>
class BaselineHead {
 public:
  BaselineHead(const EncoderConfig& encoder, std::uint64_t seed);

  Tensor<T> forward(const std::vector<Tensor<T>>& hiddens) const;

  ParameterList<T> parameters() const;
  BaselineHead clone() const;

 private:
  BaselineHead() = default;

  Tensor<T> weight_;  // [d x 2]
  Tensor<T> bias_;    // [2]
};

extern template class HsumHead<float>;
extern template class HsumHead<double>;
extern template class BaselineHead<float>;
extern template class BaselineHead<double>;

}  // namespace cclf
