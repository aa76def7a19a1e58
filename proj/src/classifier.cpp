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

#include "cclf/classifier.hpp"

#include "cclf/error.hpp"
#include "cclf/numerics/ops.hpp"
#include "cclf/numerics/random.hpp"

namespace cclf {

void ModelConfig::validate() const {
  encoder.validate();
  if (hsum_enabled && (hsum_depth == 0 || hsum_depth > encoder.n_layers)) {
    throw ConfigError("hsum depth " + std::to_string(hsum_depth) +
                      " must be in [1, n_layers=" +
                      std::to_string(encoder.n_layers) + "]");
  }
}

template <typename T>
CommentClassifier<T>::CommentClassifier(const ModelConfig& config)
    : config_(config), encoder_((config.validate(), config.encoder)) {
  const std::uint64_t head_seed = mix64(config_.encoder.seed, 0x68656164ULL);
  if (config_.hsum_enabled) {
    hsum_.emplace(config_.encoder, config_.hsum_depth, head_seed);
  } else {
    baseline_.emplace(config_.encoder, head_seed);
  }
}

template <typename T>
typename CommentClassifier<T>::Output CommentClassifier<T>::forward(
    const TokenBatch& batch, DropoutStream& dropout) const {
  auto hiddens = encoder_.forward_all_layers(batch, dropout);
  Output out;
  if (hsum_) {
    auto logits = hsum_->classify(hsum_->aggregate(hiddens, batch, dropout));
    out.level_logits = std::move(logits.per_level);
    out.logits = std::move(logits.final);
  } else {
    out.logits = baseline_->forward(hiddens);
    out.level_logits.push_back(out.logits);
  }
  return out;
}

template <typename T>
Tensor<T> CommentClassifier<T>::loss(const Output& output,
                                     std::span<const int> labels) const {
  if (hsum_) return HsumHead<T>::loss(output.level_logits, labels);
  return ops::cross_entropy_logits(output.logits, labels);
}

template <typename T>
std::vector<int> CommentClassifier<T>::predict(const TokenBatch& batch) const {
  NoGradGuard no_grad;
  auto dropout = DropoutStream::inference();
  return predict_labels(forward(batch, dropout).logits);
}

template <typename T>
ParameterList<T> CommentClassifier<T>::parameters() const {
  auto out = encoder_.parameters();
  auto head = hsum_ ? hsum_->parameters() : baseline_->parameters();
  out.insert(out.end(), head.begin(), head.end());
  return out;
}

template <typename T>
CommentClassifier<T> CommentClassifier<T>::clone() const {
  CommentClassifier copy(config_, encoder_.clone());
  if (hsum_) copy.hsum_.emplace(hsum_->clone());
  if (baseline_) copy.baseline_.emplace(baseline_->clone());
  return copy;
}

template class CommentClassifier<float>;
template class CommentClassifier<double>;

}  // namespace cclf
