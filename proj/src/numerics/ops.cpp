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

#include "cclf/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cclf/error.hpp"
#include "cclf/numerics/kernels.hpp"
#include "cclf/numerics/random.hpp"

namespace cclf::ops {
namespace {

template <typename T>
using Node = detail::Node<T>;

template <typename T>
void require_rank(const Tensor<T>& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got shape " +
                         shape_string(x.shape()));
  }
}

template <typename T>
bool wants_grad(const Node<T>& self, std::size_t input) {
  return self.inputs[input]->requires_grad;
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " +
                         shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  std::vector<T> out(m * n);
  kernels::gemm(kernels::GemmShape{m, n, k}, a.data(), b.data(),
                std::span<T>(out), false);
  return detail::make_result<T>(
      {m, n}, std::move(out), {&a, &b}, [m, n, k](Node<T>& self) {
        const auto& A = self.inputs[0]->data;
        const auto& B = self.inputs[1]->data;
        std::span<const T> dc = self.grad;
        if (wants_grad(self, 0)) {
          kernels::gemm(kernels::GemmShape{m, k, n, false, true}, dc,
                        std::span<const T>(B), self.inputs[0]->grad_buffer(),
                        true);
        }
        if (wants_grad(self, 1)) {
          kernels::gemm(kernels::GemmShape{k, n, m, true, false},
                        std::span<const T>(A), dc,
                        self.inputs[1]->grad_buffer(), true);
        }
      });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w,
                 const Tensor<T>& bias) {
  require_rank(w, 2, "linear");
  const std::size_t in = w.dim(0), out_dim = w.dim(1);
  if (x.shape().back() != in) {
    throw DimensionError("linear: input " + shape_string(x.shape()) +
                         " does not match weight " + shape_string(w.shape()));
  }
  if (bias.size() != out_dim) {
    throw DimensionError("linear: bias " + shape_string(bias.shape()) +
                         " does not match weight " + shape_string(w.shape()));
  }
  const std::size_t rows = x.size() / in;
  std::vector<T> out(rows * out_dim);
  kernels::gemm(kernels::GemmShape{rows, out_dim, in}, x.data(), w.data(),
                std::span<T>(out), false);
  const auto b = bias.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < out_dim; ++j) out[r * out_dim + j] += b[j];
  }
  Shape shape = x.shape();
  shape.back() = out_dim;
  return detail::make_result<T>(
      std::move(shape), std::move(out), {&x, &w, &bias},
      [rows, in, out_dim](Node<T>& self) {
        std::span<const T> dy = self.grad;
        if (wants_grad(self, 0)) {
          kernels::gemm(kernels::GemmShape{rows, in, out_dim, false, true}, dy,
                        std::span<const T>(self.inputs[1]->data),
                        self.inputs[0]->grad_buffer(), true);
        }
        if (wants_grad(self, 1)) {
          kernels::gemm(kernels::GemmShape{in, out_dim, rows, true, false},
                        std::span<const T>(self.inputs[0]->data), dy,
                        self.inputs[1]->grad_buffer(), true);
        }
        if (wants_grad(self, 2)) {
          auto db = self.inputs[2]->grad_buffer();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < out_dim; ++j) {
              db[j] += dy[r * out_dim + j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> batched_matmul(const Tensor<T>& a, const Tensor<T>& b,
                         bool transpose_b) {
  require_rank(a, 3, "batched_matmul");
  require_rank(b, 3, "batched_matmul");
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  const std::size_t bk = transpose_b ? b.dim(2) : b.dim(1);
  if (b.dim(0) != batch || bk != k) {
    throw DimensionError("batched_matmul: incompatible shapes " +
                         shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  std::vector<T> out(batch * m * n);
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t i = 0; i < batch; ++i) {
    kernels::gemm(kernels::GemmShape{m, n, k, false, transpose_b},
                  A.subspan(i * m * k, m * k), B.subspan(i * k * n, k * n),
                  std::span<T>(out).subspan(i * m * n, m * n), false);
  }
  return detail::make_result<T>(
      {batch, m, n}, std::move(out), {&a, &b},
      [batch, m, n, k, transpose_b](Node<T>& self) {
        std::span<const T> dc = self.grad;
        std::span<const T> A = self.inputs[0]->data;
        std::span<const T> B = self.inputs[1]->data;
        const bool ga = wants_grad(self, 0), gb = wants_grad(self, 1);
        std::span<T> da = ga ? self.inputs[0]->grad_buffer() : std::span<T>{};
        std::span<T> db = gb ? self.inputs[1]->grad_buffer() : std::span<T>{};
        for (std::size_t i = 0; i < batch; ++i) {
          auto dci = dc.subspan(i * m * n, m * n);
          auto ai = A.subspan(i * m * k, m * k);
          auto bi = B.subspan(i * k * n, k * n);
          if (ga) {
            // dA = dC * op(B)^T
            kernels::gemm(kernels::GemmShape{m, k, n, false, !transpose_b},
                          dci, bi, da.subspan(i * m * k, m * k), true);
          }
          if (gb) {
            if (transpose_b) {
              // B stored [n x k]: dB = dC^T * A
              kernels::gemm(kernels::GemmShape{n, k, m, true, false}, dci, ai,
                            db.subspan(i * k * n, k * n), true);
            } else {
              // dB = A^T * dC
              kernels::gemm(kernels::GemmShape{k, n, m, true, false}, ai, dci,
                            db.subspan(i * k * n, k * n), true);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("add: shapes differ, " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
  std::vector<T> out(a.size());
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return detail::make_result<T>(a.shape(), std::move(out), {&a, &b},
                                [](Node<T>& self) {
                                  for (std::size_t in = 0; in < 2; ++in) {
                                    if (!wants_grad(self, in)) continue;
                                    auto g = self.inputs[in]->grad_buffer();
                                    for (std::size_t i = 0; i < g.size(); ++i) {
                                      g[i] += self.grad[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("mul: shapes differ, " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
  std::vector<T> out(a.size());
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return detail::make_result<T>(
      a.shape(), std::move(out), {&a, &b}, [](Node<T>& self) {
        for (std::size_t in = 0; in < 2; ++in) {
          if (!wants_grad(self, in)) continue;
          const auto& other = self.inputs[1 - in]->data;
          auto g = self.inputs[in]->grad_buffer();
          for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += other[i] * self.grad[i];
          }
        }
      });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  std::vector<T> out(x.data().begin(), x.data().end());
  for (auto& v : out) v *= factor;
  return detail::make_result<T>(x.shape(), std::move(out), {&x},
                                [factor](Node<T>& self) {
                                  auto g = self.inputs[0]->grad_buffer();
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    g[i] += factor * self.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = 0;
  for (auto v : x.data()) total += v;
  return detail::make_result<T>({1}, {total}, {&x}, [](Node<T>& self) {
    auto g = self.inputs[0]->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean_of(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw ContractError("mean_of: empty input list");
  const Shape& shape = xs.front().shape();
  std::vector<T> out(xs.front().size(), T(0));
  std::vector<const Tensor<T>*> inputs;
  for (const auto& x : xs) {
    if (x.shape() != shape) {
      throw DimensionError("mean_of: shapes differ, " + shape_string(shape) +
                           " vs " + shape_string(x.shape()));
    }
    const auto d = x.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
    inputs.push_back(&x);
  }
  const T inv = T(1) / static_cast<T>(xs.size());
  for (auto& v : out) v *= inv;
  return detail::make_result<T>(shape, std::move(out), inputs,
                                [inv](Node<T>& self) {
                                  for (std::size_t in = 0;
                                       in < self.inputs.size(); ++in) {
                                    if (!wants_grad(self, in)) continue;
                                    auto g = self.inputs[in]->grad_buffer();
                                    for (std::size_t i = 0; i < g.size(); ++i) {
                                      g[i] += inv * self.grad[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_string(x.shape()) + " to " +
                         shape_string(shape));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return detail::make_result<T>(std::move(shape), std::move(out), {&x},
                                [](Node<T>& self) {
                                  auto g = self.inputs[0]->grad_buffer();
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    g[i] += self.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) +
                         " invalid for shape " + shape_string(x.shape()));
  }
  const auto& s = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t n = s[axis];
  std::vector<T> out(x.size());
  const auto in = x.data();
  if (inner == 1) {
    kernels::softmax_rows(in, std::span<T>(out), outer, n);
  } else {
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * n * inner + i;
        T mx = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, in[base + j * inner]);
        T total = 0;
        for (std::size_t j = 0; j < n; ++j) {
          out[base + j * inner] = std::exp(in[base + j * inner] - mx);
          total += out[base + j * inner];
        }
        for (std::size_t j = 0; j < n; ++j) out[base + j * inner] /= total;
      }
    }
  }
  return detail::make_result<T>(
      s, std::move(out), {&x}, [outer, n, inner](Node<T>& self) {
        auto dx = self.inputs[0]->grad_buffer();
        std::span<const T> y = self.data;
        std::span<const T> dy = self.grad;
        if (inner == 1) {
          kernels::softmax_rows_backward(y, dy, dx, outer, n);
          return;
        }
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t base = o * n * inner + i;
            T dot = 0;
            for (std::size_t j = 0; j < n; ++j) {
              dot += y[base + j * inner] * dy[base + j * inner];
            }
            for (std::size_t j = 0; j < n; ++j) {
              const std::size_t at = base + j * inner;
              dx[at] += y[at] * (dy[at] - dot);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> mask_keys(const Tensor<T>& scores,
                    std::span<const std::uint8_t> key_mask,
                    std::size_t heads) {
  require_rank(scores, 3, "mask_keys");
  const std::size_t bh = scores.dim(0), tq = scores.dim(1), tk = scores.dim(2);
  if (heads == 0 || bh % heads != 0 || key_mask.size() != (bh / heads) * tk) {
    throw DimensionError("mask_keys: mask of " +
                         std::to_string(key_mask.size()) +
                         " entries does not fit scores " +
                         shape_string(scores.shape()));
  }
  std::vector<std::uint8_t> keep(scores.size());
  std::vector<T> out(scores.data().begin(), scores.data().end());
  for (std::size_t z = 0; z < bh; ++z) {
    const std::uint8_t* row_mask = key_mask.data() + (z / heads) * tk;
    for (std::size_t q = 0; q < tq; ++q) {
      for (std::size_t j = 0; j < tk; ++j) {
        const std::size_t at = (z * tq + q) * tk + j;
        keep[at] = row_mask[j];
        if (!row_mask[j]) out[at] = -std::numeric_limits<T>::infinity();
      }
    }
  }
  return detail::make_result<T>(scores.shape(), std::move(out), {&scores},
                                [keep = std::move(keep)](Node<T>& self) {
                                  auto g = self.inputs[0]->grad_buffer();
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    if (keep[i]) g[i] += self.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps) {
  const std::size_t n = x.shape().back();
  if (gamma.size() != n || beta.size() != n) {
    throw DimensionError("layer_norm: gamma/beta must have " +
                         std::to_string(n) + " entries");
  }
  if (!(eps > T(0))) throw ContractError("layer_norm: eps must be positive");
  const std::size_t rows = x.size() / n;
  std::vector<T> out(x.size());
  std::vector<T> mean(rows), rstd(rows);
  kernels::layer_norm_rows(x.data(), gamma.data(), beta.data(),
                           std::span<T>(out), std::span<T>(mean),
                           std::span<T>(rstd), rows, n, eps);
  return detail::make_result<T>(
      x.shape(), std::move(out), {&x, &gamma, &beta},
      [rows, n, mean = std::move(mean), rstd = std::move(rstd)](Node<T>& self) {
        std::span<T> dx, dg, db;
        if (wants_grad(self, 0)) dx = self.inputs[0]->grad_buffer();
        if (wants_grad(self, 1)) dg = self.inputs[1]->grad_buffer();
        if (wants_grad(self, 2)) db = self.inputs[2]->grad_buffer();
        kernels::layer_norm_rows_backward(
            std::span<const T>(self.inputs[0]->data),
            std::span<const T>(self.inputs[1]->data), std::span<const T>(mean),
            std::span<const T>(rstd), std::span<const T>(self.grad), dx, dg, db,
            rows, n);
      });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  std::vector<T> out(x.size());
  kernels::gelu(x.data(), std::span<T>(out));
  return detail::make_result<T>(x.shape(), std::move(out), {&x},
                                [](Node<T>& self) {
                                  kernels::gelu_backward(
                                      std::span<const T>(self.inputs[0]->data),
                                      std::span<const T>(self.grad),
                                      self.inputs[0]->grad_buffer());
                                });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, std::uint64_t key) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ContractError("dropout: rate must be in [0, 1)");
  }
  if (rate == 0.0) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> factor(x.size());
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    factor[i] = unit_double(mix64(key, i)) >= rate ? keep_scale : T(0);
    out[i] = in[i] * factor[i];
  }
  return detail::make_result<T>(x.shape(), std::move(out), {&x},
                                [factor = std::move(factor)](Node<T>& self) {
                                  auto g = self.inputs[0]->grad_buffer();
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    g[i] += factor[i] * self.grad[i];
                                  }
                                });
}

template <typename T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const std::int32_t> ids,
                    const Shape& ids_shape) {
  require_rank(table, 2, "embedding");
  if (numel(ids_shape) != ids.size()) {
    throw DimensionError("embedding: ids do not match their shape");
  }
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<T> out(ids.size() * d);
  const auto t = table.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw DimensionError("embedding: id " + std::to_string(ids[i]) +
                           " outside table of " + std::to_string(vocab));
    }
    std::copy_n(t.begin() + ids[i] * d, d, out.begin() + i * d);
  }
  Shape shape = ids_shape;
  shape.push_back(d);
  std::vector<std::int32_t> index(ids.begin(), ids.end());
  return detail::make_result<T>(
      std::move(shape), std::move(out), {&table},
      [d, index = std::move(index)](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < index.size(); ++i) {
          T* row = g.data() + static_cast<std::size_t>(index[i]) * d;
          const T* src = self.grad.data() + i * d;
          for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
        }
      });
}

template <typename T>
Tensor<T> split_heads(const Tensor<T>& x, std::size_t heads) {
  require_rank(x, 3, "split_heads");
  const std::size_t b = x.dim(0), t = x.dim(1), d = x.dim(2);
  if (heads == 0 || d % heads != 0) {
    throw DimensionError("split_heads: width " + std::to_string(d) +
                         " not divisible into " + std::to_string(heads));
  }
  const std::size_t dh = d / heads;
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t ti = 0; ti < t; ++ti)
      for (std::size_t h = 0; h < heads; ++h)
        std::copy_n(in.begin() + (bi * t + ti) * d + h * dh, dh,
                    out.begin() + ((bi * heads + h) * t + ti) * dh);
  return detail::make_result<T>(
      {b * heads, t, dh}, std::move(out), {&x},
      [b, t, heads, dh, d](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t bi = 0; bi < b; ++bi)
          for (std::size_t ti = 0; ti < t; ++ti)
            for (std::size_t h = 0; h < heads; ++h) {
              const T* src = self.grad.data() + ((bi * heads + h) * t + ti) * dh;
              T* dst = g.data() + (bi * t + ti) * d + h * dh;
              for (std::size_t j = 0; j < dh; ++j) dst[j] += src[j];
            }
      });
}

template <typename T>
Tensor<T> merge_heads(const Tensor<T>& x, std::size_t heads) {
  require_rank(x, 3, "merge_heads");
  if (heads == 0 || x.dim(0) % heads != 0) {
    throw DimensionError("merge_heads: leading extent " +
                         std::to_string(x.dim(0)) + " not divisible by " +
                         std::to_string(heads));
  }
  const std::size_t b = x.dim(0) / heads, t = x.dim(1), dh = x.dim(2);
  const std::size_t d = dh * heads;
  std::vector<T> out(x.size());
  const auto in = x.data();
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t h = 0; h < heads; ++h)
      for (std::size_t ti = 0; ti < t; ++ti)
        std::copy_n(in.begin() + ((bi * heads + h) * t + ti) * dh, dh,
                    out.begin() + (bi * t + ti) * d + h * dh);
  return detail::make_result<T>(
      {b, t, d}, std::move(out), {&x}, [b, t, heads, dh, d](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t bi = 0; bi < b; ++bi)
          for (std::size_t h = 0; h < heads; ++h)
            for (std::size_t ti = 0; ti < t; ++ti) {
              const T* src = self.grad.data() + (bi * t + ti) * d + h * dh;
              T* dst = g.data() + ((bi * heads + h) * t + ti) * dh;
              for (std::size_t j = 0; j < dh; ++j) dst[j] += src[j];
            }
      });
}

template <typename T>
Tensor<T> select_position(const Tensor<T>& x, std::size_t position) {
  require_rank(x, 3, "select_position");
  const std::size_t b = x.dim(0), t = x.dim(1), d = x.dim(2);
  if (position >= t) {
    throw DimensionError("select_position: position " +
                         std::to_string(position) + " beyond length " +
                         std::to_string(t));
  }
  std::vector<T> out(b * d);
  const auto in = x.data();
  for (std::size_t bi = 0; bi < b; ++bi) {
    std::copy_n(in.begin() + (bi * t + position) * d, d, out.begin() + bi * d);
  }
  return detail::make_result<T>(
      {b, d}, std::move(out), {&x}, [b, t, d, position](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t bi = 0; bi < b; ++bi)
          for (std::size_t j = 0; j < d; ++j)
            g[(bi * t + position) * d + j] += self.grad[bi * d + j];
      });
}

template <typename T>
Tensor<T> cross_entropy_logits(const Tensor<T>& logits,
                               std::span<const int> labels) {
  require_rank(logits, 2, "cross_entropy_logits");
  const std::size_t b = logits.dim(0), c = logits.dim(1);
  if (labels.size() != b) {
    throw DimensionError("cross_entropy_logits: " +
                         std::to_string(labels.size()) + " labels for batch " +
                         std::to_string(b));
  }
  for (std::size_t i = 0; i < b; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw LabelError("cross_entropy_logits: label " +
                       std::to_string(labels[i]) + " at row " +
                       std::to_string(i) + " outside [0, " +
                       std::to_string(c) + ")");
    }
  }
  const auto z = logits.data();
  std::vector<T> probs(b * c);
  T total = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const T* row = z.data() + i * c;
    const T mx = *std::max_element(row, row + c);
    T s = 0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(row[j] - mx);
    const T lse = mx + std::log(s);
    total += lse - row[labels[i]];
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = std::exp(row[j] - lse);
  }
  std::vector<int> y(labels.begin(), labels.end());
  return detail::make_result<T>(
      {1}, {total / static_cast<T>(b)}, {&logits},
      [b, c, probs = std::move(probs), y = std::move(y)](Node<T>& self) {
        auto g = self.inputs[0]->grad_buffer();
        const T coeff = self.grad[0] / static_cast<T>(b);
        for (std::size_t i = 0; i < b; ++i) {
          for (std::size_t j = 0; j < c; ++j) {
            const T target = static_cast<int>(j) == y[i] ? T(1) : T(0);
            g[i * c + j] += coeff * (probs[i * c + j] - target);
          }
        }
      });
}

#define CCLF_INSTANTIATE_OPS(T)                                                \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&,                \
                            const Tensor<T>&);                                 \
  template Tensor<T> batched_matmul(const Tensor<T>&, const Tensor<T>&, bool); \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> scale(const Tensor<T>&, T);                               \
  template Tensor<T> sum(const Tensor<T>&);                                    \
  template Tensor<T> mean_of(const std::vector<Tensor<T>>&);                   \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                         \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                   \
  template Tensor<T> mask_keys(const Tensor<T>&, std::span<const std::uint8_t>, \
                               std::size_t);                                   \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>&, T);                          \
  template Tensor<T> gelu(const Tensor<T>&);                                   \
  template Tensor<T> dropout(const Tensor<T>&, double, std::uint64_t);         \
  template Tensor<T> embedding(const Tensor<T>&, std::span<const std::int32_t>, \
                               const Shape&);                                  \
  template Tensor<T> split_heads(const Tensor<T>&, std::size_t);               \
  template Tensor<T> merge_heads(const Tensor<T>&, std::size_t);               \
  template Tensor<T> select_position(const Tensor<T>&, std::size_t);           \
  template Tensor<T> cross_entropy_logits(const Tensor<T>&,                    \
                                          std::span<const int>);

CCLF_INSTANTIATE_OPS(float)
CCLF_INSTANTIATE_OPS(double)

#undef CCLF_INSTANTIATE_OPS

}  // namespace cclf::ops
