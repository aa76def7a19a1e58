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

#include <optional>
#include <span>
#include <vector>

#include "cclf/encoder.hpp"
#include "cclf/hsum.hpp"

namespace cclf {

struct ModelConfig {
  EncoderConfig encoder;
  bool hsum_enabled = true;
  std::size_t hsum_depth = 4;

  void validate() const;
};

// Encoder plus either the HSUM head or the last-layer baseline head.
template <typename T>
class CommentClassifier {
 public:
  struct Output {
    std::vector<Tensor<T>> level_logits;  // one per HSUM level; baseline: one
    Tensor<T> logits;                     // [B x 2]
  };

  explicit CommentClassifier(const ModelConfig& config);

  Output forward(const TokenBatch& batch, DropoutStream& dropout) const;
  Tensor<T> loss(const Output& output, std::span<const int> labels) const;
  // Inference mode: no dropout, no tape.
  std::vector<int> predict(const TokenBatch& batch) const;

  const ModelConfig& config() const { return config_; }
  const Encoder<T>& encoder() const { return encoder_; }
  HsumHead<T>* hsum_head() { return hsum_ ? &*hsum_ : nullptr; }

  // Stable order: encoder parameters, then head parameters.
  ParameterList<T> parameters() const;
  CommentClassifier clone() const;

 private:
  CommentClassifier(ModelConfig config, Encoder<T> encoder)
      : config_(std::move(config)), encoder_(std::move(encoder)) {}

  ModelConfig config_;
  Encoder<T> encoder_;
  std::optional<HsumHead<T>> hsum_;
  std::optional<BaselineHead<T>> baseline_;
};

extern template class CommentClassifier<float>;
extern template class CommentClassifier<double>;

}  // namespace cclf
