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

// Differentiable tensor operations. Each returns a new tensor and, when any
// input requires grad, records a backward closure on the tape.

#include <cstdint>
#include <span>
#include <vector>

#include "cclf/numerics/tensor.hpp"

namespace cclf::ops {

// a[m x k] * b[k x n].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// x[..., in] * w[in x out] + bias[out]. Leading axes are flattened.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias);

// a[N x m x k] * b[N x k x n], or b[N x n x k] transposed when transpose_b.
template <typename T>
Tensor<T> batched_matmul(const Tensor<T>& a, const Tensor<T>& b,
                         bool transpose_b);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise product of equally shaped tensors.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);

// Sum of all elements, shape [1].
template <typename T>
Tensor<T> sum(const Tensor<T>& x);

// Elementwise mean of equally shaped tensors.
template <typename T>
Tensor<T> mean_of(const std::vector<Tensor<T>>& xs);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

// Max-subtracted softmax along `axis`.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

// scores[B*H x T x T]: key positions j with key_mask[b*T + j] == 0 are set to
// -inf. key_mask is [B x T].
template <typename T>
Tensor<T> mask_keys(const Tensor<T>& scores, std::span<const std::uint8_t> key_mask,
                    std::size_t heads);

// Normalizes over the last axis, then gamma * xhat + beta.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps);

// Exact erf form x * Phi(x).
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);

// Inverted dropout. Element i is kept iff unit(mix(key, i)) >= rate.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, std::uint64_t key);

// Row gather: ids has shape ids_shape, result ids_shape + [d].
template <typename T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const std::int32_t> ids,
                    const Shape& ids_shape);

// [B x T x H*dh] -> [B*H x T x dh].
template <typename T>
Tensor<T> split_heads(const Tensor<T>& x, std::size_t heads);

// [B*H x T x dh] -> [B x T x H*dh].
template <typename T>
Tensor<T> merge_heads(const Tensor<T>& x, std::size_t heads);

// [B x T x d] -> [B x d] at sequence position `position`.
template <typename T>
Tensor<T> select_position(const Tensor<T>& x, std::size_t position);

// Mean over the batch of -log softmax(z)[y]. z is [B x C].
template <typename T>
Tensor<T> cross_entropy_logits(const Tensor<T>& logits,
                               std::span<const int> labels);

}  // namespace cclf::ops
