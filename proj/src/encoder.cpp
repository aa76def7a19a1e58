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

#include "cclf/encoder.hpp"

#include <cmath>

#include "cclf/error.hpp"
#include "cclf/numerics/ops.hpp"
#include "cclf/numerics/random.hpp"

namespace cclf {

void EncoderConfig::validate() const {
  if (vocab_size < 4) throw ConfigError("encoder vocab_size must be >= 4");
  if (d_model == 0) throw ConfigError("encoder d_model must be positive");
  if (n_layers == 0) throw ConfigError("encoder n_layers must be positive");
  if (n_heads == 0 || d_model % n_heads != 0) {
    throw ConfigError("encoder d_model (" + std::to_string(d_model) +
                      ") must be divisible by n_heads (" +
                      std::to_string(n_heads) + ")");
  }
  if (d_ff == 0) throw ConfigError("encoder d_ff must be positive");
  if (max_len < 2) throw ConfigError("encoder max_len must be >= 2");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("encoder dropout_rate must be in [0, 1)");
  }
}

std::uint64_t DropoutStream::next_key() {
  return mix64(seed_, step_, calls_++);
}

template <typename T>
Tensor<T> DropoutStream::apply(const Tensor<T>& x) {
  if (!active()) return x;
  return ops::dropout(x, rate_, next_key());
}

template Tensor<float> DropoutStream::apply(const Tensor<float>&);
template Tensor<double> DropoutStream::apply(const Tensor<double>&);

template <typename T>
Tensor<T> init_normal(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 0.02);
  std::vector<T> data(numel(shape));
  for (auto& v : data) v = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(data), true);
}

template Tensor<float> init_normal(Shape, std::mt19937_64&);
template Tensor<double> init_normal(Shape, std::mt19937_64&);

namespace {

template <typename T>
Tensor<T> param_full(std::size_t n, T value) {
  return Tensor<T>::full({n}, value, true);
}

}  // namespace

template <typename T>
EncoderLayer<T>::EncoderLayer(std::size_t d_model, std::size_t n_heads,
                              std::size_t d_ff, std::mt19937_64& rng)
    : n_heads_(n_heads),
      ln1_gain_(param_full<T>(d_model, T(1))),
      ln1_bias_(param_full<T>(d_model, T(0))),
      wq_(init_normal<T>({d_model, d_model}, rng)),
      bq_(param_full<T>(d_model, T(0))),
      wk_(init_normal<T>({d_model, d_model}, rng)),
      bk_(param_full<T>(d_model, T(0))),
      wv_(init_normal<T>({d_model, d_model}, rng)),
      bv_(param_full<T>(d_model, T(0))),
      wo_(init_normal<T>({d_model, d_model}, rng)),
      bo_(param_full<T>(d_model, T(0))),
      ln2_gain_(param_full<T>(d_model, T(1))),
      ln2_bias_(param_full<T>(d_model, T(0))),
      w1_(init_normal<T>({d_model, d_ff}, rng)),
      b1_(param_full<T>(d_ff, T(0))),
      w2_(init_normal<T>({d_ff, d_model}, rng)),
      b2_(param_full<T>(d_model, T(0))) {}

template <typename T>
Tensor<T> EncoderLayer<T>::forward(const Tensor<T>& x, const TokenBatch& batch,
                                   DropoutStream& dropout,
                                   AttentionTrace<T>* trace) const {
  const std::size_t d = x.dim(2);
  const std::size_t head_dim = d / n_heads_;
  const T eps = T(1e-5);

  auto h = ops::layer_norm(x, ln1_gain_, ln1_bias_, eps);
  auto q = ops::split_heads(ops::linear(h, wq_, bq_), n_heads_);
  auto k = ops::split_heads(ops::linear(h, wk_, bk_), n_heads_);
  auto v = ops::split_heads(ops::linear(h, wv_, bv_), n_heads_);
  q = ops::scale(q, T(1) / std::sqrt(static_cast<T>(head_dim)));
  auto scores = ops::mask_keys(ops::batched_matmul(q, k, true), batch.mask,
                               n_heads_);
  auto probs = ops::softmax(scores, 2);
  if (trace) trace->probabilities.push_back(probs);
  auto context = ops::merge_heads(ops::batched_matmul(probs, v, false), n_heads_);
  auto attended = ops::add(x, dropout.apply(ops::linear(context, wo_, bo_)));

  auto h2 = ops::layer_norm(attended, ln2_gain_, ln2_bias_, eps);
  auto ff = ops::linear(ops::gelu(ops::linear(h2, w1_, b1_)), w2_, b2_);
  return ops::add(attended, dropout.apply(ff));
}

template <typename T>
void EncoderLayer<T>::collect(const std::string& prefix,
                              ParameterList<T>& out) const {
  out.push_back({prefix + "ln1.gain", ln1_gain_});
  out.push_back({prefix + "ln1.bias", ln1_bias_});
  out.push_back({prefix + "attn.wq", wq_});
  out.push_back({prefix + "attn.bq", bq_});
  out.push_back({prefix + "attn.wk", wk_});
  out.push_back({prefix + "attn.bk", bk_});
  out.push_back({prefix + "attn.wv", wv_});
  out.push_back({prefix + "attn.bv", bv_});
  out.push_back({prefix + "attn.wo", wo_});
  out.push_back({prefix + "attn.bo", bo_});
  out.push_back({prefix + "ln2.gain", ln2_gain_});
  out.push_back({prefix + "ln2.bias", ln2_bias_});
  out.push_back({prefix + "ffn.w1", w1_});
  out.push_back({prefix + "ffn.b1", b1_});
  out.push_back({prefix + "ffn.w2", w2_});
  out.push_back({prefix + "ffn.b2", b2_});
}

template <typename T>
EncoderLayer<T> EncoderLayer<T>::clone() const {
  EncoderLayer copy;
  copy.n_heads_ = n_heads_;
  copy.ln1_gain_ = ln1_gain_.clone();
  copy.ln1_bias_ = ln1_bias_.clone();
  copy.wq_ = wq_.clone();
  copy.bq_ = bq_.clone();
  copy.wk_ = wk_.clone();
  copy.bk_ = bk_.clone();
  copy.wv_ = wv_.clone();
  copy.bv_ = bv_.clone();
  copy.wo_ = wo_.clone();
  copy.bo_ = bo_.clone();
  copy.ln2_gain_ = ln2_gain_.clone();
  copy.ln2_bias_ = ln2_bias_.clone();
  copy.w1_ = w1_.clone();
  copy.b1_ = b1_.clone();
  copy.w2_ = w2_.clone();
  copy.b2_ = b2_.clone();
  return copy;
}

template <typename T>
Encoder<T>::Encoder(const EncoderConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(mix64(config_.seed, 0x656e636fULL));
  token_embedding_ = init_normal<T>({config_.vocab_size, config_.d_model}, rng);
  position_embedding_ = init_normal<T>({config_.max_len, config_.d_model}, rng);
  layers_.reserve(config_.n_layers);
  for (std::size_t i = 0; i < config_.n_layers; ++i) {
    layers_.emplace_back(config_.d_model, config_.n_heads, config_.d_ff, rng);
  }
  final_gain_ = param_full<T>(config_.d_model, T(1));
  final_bias_ = param_full<T>(config_.d_model, T(0));
}

template <typename T>
std::vector<Tensor<T>> Encoder<T>::forward_all_layers(
    const TokenBatch& batch, DropoutStream& dropout,
    AttentionTrace<T>* trace) const {
  if (batch.length > config_.max_len) {
    throw LengthError("sequence length " + std::to_string(batch.length) +
                      " exceeds encoder max_len " +
                      std::to_string(config_.max_len));
  }
  const Shape ids_shape{batch.batch, batch.length};
  std::vector<TokenId> positions(batch.batch * batch.length);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    for (std::size_t t = 0; t < batch.length; ++t) {
      positions[b * batch.length + t] = static_cast<TokenId>(t);
    }
  }
  auto x = ops::add(ops::embedding(token_embedding_, batch.ids, ids_shape),
                    ops::embedding(position_embedding_, positions, ids_shape));
  x = dropout.apply(x);

  std::vector<Tensor<T>> hiddens;
  hiddens.reserve(layers_.size() + 1);
  hiddens.push_back(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(x, batch, dropout, trace);
    if (i + 1 == layers_.size()) {
      x = ops::layer_norm(x, final_gain_, final_bias_, T(1e-5));
    }
    hiddens.push_back(x);
  }
  return hiddens;
}

template <typename T>
ParameterList<T> Encoder<T>::parameters() const {
  ParameterList<T> out;
  out.push_back({"encoder.token_embedding", token_embedding_});
  out.push_back({"encoder.position_embedding", position_embedding_});
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].collect("encoder.layer" + std::to_string(i) + ".", out);
  }
  out.push_back({"encoder.final_ln.gain", final_gain_});
  out.push_back({"encoder.final_ln.bias", final_bias_});
  return out;
}

template <typename T>
Encoder<T> Encoder<T>::clone() const {
  Encoder copy;
  copy.config_ = config_;
  copy.token_embedding_ = token_embedding_.clone();
  copy.position_embedding_ = position_embedding_.clone();
  copy.layers_.reserve(layers_.size());
  for (const auto& layer : layers_) copy.layers_.push_back(layer.clone());
  copy.final_gain_ = final_gain_.clone();
  copy.final_bias_ = final_bias_.clone();
  return copy;
}

template class EncoderLayer<float>;
template class EncoderLayer<double>;
template class Encoder<float>;
template class Encoder<double>;

}  // namespace cclf
