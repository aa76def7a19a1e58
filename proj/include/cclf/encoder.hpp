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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cclf/numerics/tensor.hpp"
#include "cclf/tokenizer.hpp"

namespace cclf {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t n_layers = 4;
  std::size_t n_heads = 4;
  std::size_t d_ff = 256;
  std::size_t max_len = 128;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

template <typename T>
std::size_t parameter_count(const ParameterList<T>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

// Dropout keys for one forward pass. Each dropout site draws the next key
// from (seed, step, call counter), so masks are reproducible per step.
class DropoutStream {
 public:
  static DropoutStream inference() { return DropoutStream(false, 0.0, 0, 0); }
  static DropoutStream training(double rate, std::uint64_t seed,
                                std::uint64_t step) {
    return DropoutStream(true, rate, seed, step);
  }

  bool active() const { return active_ && rate_ > 0.0; }
  double rate() const { return rate_; }
  std::uint64_t next_key();

  template <typename T>
  Tensor<T> apply(const Tensor<T>& x);

 private:
  DropoutStream(bool active, double rate, std::uint64_t seed,
                std::uint64_t step)
      : active_(active), rate_(rate), seed_(seed), step_(step) {}

  bool active_;
  double rate_;
  std::uint64_t seed_;
  std::uint64_t step_;
  std::uint64_t calls_ = 0;
};

// Attention probabilities recorded during a forward pass, one
// [B*H x T x T] tensor per layer. Inspection only.
template <typename T>
struct AttentionTrace {
  std::vector<Tensor<T>> probabilities;
};

// Pre-norm transformer layer: x + Attn(LN(x)), then + FFN(LN(.)).
template <typename T>
class EncoderLayer {
 public:
  EncoderLayer(std::size_t d_model, std::size_t n_heads, std::size_t d_ff,
               std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x, const TokenBatch& batch,
                    DropoutStream& dropout,
                    AttentionTrace<T>* trace = nullptr) const;

  void collect(const std::string& prefix, ParameterList<T>& out) const;
  EncoderLayer clone() const;

 private:
  EncoderLayer() = default;

  std::size_t n_heads_ = 1;
  Tensor<T> ln1_gain_, ln1_bias_;
  Tensor<T> wq_, bq_, wk_, bk_, wv_, bv_, wo_, bo_;
  Tensor<T> ln2_gain_, ln2_bias_;
  Tensor<T> w1_, b1_, w2_, b2_;
};

template <typename T>
class Encoder {
 public:
  explicit Encoder(const EncoderConfig& config);

  // L+1 hidden states of shape [B x T x d]: index 0 is token + position
  // embedding, index i the output of layer i. The top state is passed
  // through the final layer norm.
  std::vector<Tensor<T>> forward_all_layers(
      const TokenBatch& batch, DropoutStream& dropout,
      AttentionTrace<T>* trace = nullptr) const;

  const EncoderConfig& config() const { return config_; }
  ParameterList<T> parameters() const;
  Encoder clone() const;

 private:
  Encoder() = default;

  EncoderConfig config_;
  Tensor<T> token_embedding_;
  Tensor<T> position_embedding_;
  std::vector<EncoderLayer<T>> layers_;
  Tensor<T> final_gain_, final_bias_;
};

// Normal(0, 0.02^2) weights drawn from rng.
template <typename T>
Tensor<T> init_normal(Shape shape, std::mt19937_64& rng);

extern template class EncoderLayer<float>;
extern template class EncoderLayer<double>;
extern template class Encoder<float>;
extern template class Encoder<double>;

}  // namespace cclf
