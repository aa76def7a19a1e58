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

#include <algorithm>
#include <cmath>
#include <limits>

#include "cclf/numerics/kernels.hpp"

namespace cclf::kernels::serial {
namespace {

template <typename T>
T at_a(const GemmShape& s, std::span<const T> a, std::size_t i,
       std::size_t p) {
  return s.trans_a ? a[p * s.m + i] : a[i * s.k + p];
}

template <typename T>
T at_b(const GemmShape& s, std::span<const T> b, std::size_t p,
       std::size_t j) {
  return s.trans_b ? b[j * s.k + p] : b[p * s.n + j];
}

template <typename T>
void gemm_impl(const GemmShape& s, std::span<const T> a, std::span<const T> b,
               std::span<T> c, bool accumulate) {
  for (std::size_t i = 0; i < s.m; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) {
      T acc = accumulate ? c[i * s.n + j] : T(0);
      for (std::size_t p = 0; p < s.k; ++p) {
        acc += at_a(s, a, i, p) * at_b(s, b, p, j);
      }
      c[i * s.n + j] = acc;
    }
  }
}

template <typename T>
void softmax_impl(std::span<const T> x, std::span<T> y, std::size_t rows,
                  std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * n;
    T* out = y.data() + r * n;
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, in[j]);
    T total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = std::exp(in[j] - mx);
      total += out[j];
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= total;
  }
}

template <typename T>
void softmax_backward_impl(std::span<const T> y, std::span<const T> dy,
                           std::span<T> dx, std::size_t rows, std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * n;
    T dot = 0;
    for (std::size_t j = 0; j < n; ++j) dot += y[base + j] * dy[base + j];
    for (std::size_t j = 0; j < n; ++j) {
      dx[base + j] += y[base + j] * (dy[base + j] - dot);
    }
  }
}

template <typename T>
void layer_norm_impl(std::span<const T> x, std::span<const T> gamma,
                     std::span<const T> beta, std::span<T> y,
                     std::span<T> mean, std::span<T> rstd, std::size_t rows,
                     std::size_t n, T eps) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * n;
    T mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += in[j];
    mu /= static_cast<T>(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (in[j] - mu) * (in[j] - mu);
    var /= static_cast<T>(n);
    const T inv = T(1) / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      y[r * n + j] = (in[j] - mu) * inv * gamma[j] + beta[j];
    }
  }
}

template <typename T>
void layer_norm_backward_impl(std::span<const T> x, std::span<const T> gamma,
                              std::span<const T> mean, std::span<const T> rstd,
                              std::span<const T> dy, std::span<T> dx,
                              std::span<T> dgamma, std::span<T> dbeta,
                              std::size_t rows, std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * n;
    T sum_g = 0;
    T sum_gx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const T xhat = (x[base + j] - mean[r]) * rstd[r];
      const T g = dy[base + j] * gamma[j];
      sum_g += g;
      sum_gx += g * xhat;
      if (!dgamma.empty()) dgamma[j] += dy[base + j] * xhat;
      if (!dbeta.empty()) dbeta[j] += dy[base + j];
    }
    if (dx.empty()) continue;
    const T inv_n = T(1) / static_cast<T>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const T xhat = (x[base + j] - mean[r]) * rstd[r];
      const T g = dy[base + j] * gamma[j];
      dx[base + j] += rstd[r] * (g - sum_g * inv_n - xhat * sum_gx * inv_n);
    }
  }
}

template <typename T>
void gelu_impl(std::span<const T> x, std::span<T> y) {
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = T(0.5) * x[i] * (T(1) + std::erf(x[i] * inv_sqrt2));
  }
}

template <typename T>
void gelu_backward_impl(std::span<const T> x, std::span<const T> dy,
                        std::span<T> dx) {
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  const T inv_sqrt2pi = T(1) / std::sqrt(T(2) * T(3.14159265358979323846));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T cdf = T(0.5) * (T(1) + std::erf(x[i] * inv_sqrt2));
    const T pdf = inv_sqrt2pi * std::exp(T(-0.5) * x[i] * x[i]);
    dx[i] += dy[i] * (cdf + x[i] * pdf);
  }
}

}  // namespace

#define CCLF_DEFINE_SERIAL(T)                                                  \
  void gemm(const GemmShape& shape, std::span<const T> a,                      \
            std::span<const T> b, std::span<T> c, bool accumulate) {           \
    gemm_impl<T>(shape, a, b, c, accumulate);                                  \
  }                                                                            \
  void softmax_rows(std::span<const T> x, std::span<T> y, std::size_t rows,    \
                    std::size_t n) {                                           \
    softmax_impl<T>(x, y, rows, n);                                            \
  }                                                                            \
  void softmax_rows_backward(std::span<const T> y, std::span<const T> dy,      \
                             std::span<T> dx, std::size_t rows,                \
                             std::size_t n) {                                  \
    softmax_backward_impl<T>(y, dy, dx, rows, n);                              \
  }                                                                            \
  void layer_norm_rows(std::span<const T> x, std::span<const T> gamma,         \
                       std::span<const T> beta, std::span<T> y,                \
                       std::span<T> mean, std::span<T> rstd, std::size_t rows, \
                       std::size_t n, T eps) {                                 \
    layer_norm_impl<T>(x, gamma, beta, y, mean, rstd, rows, n, eps);           \
  }                                                                            \
  void layer_norm_rows_backward(                                               \
      std::span<const T> x, std::span<const T> gamma,                          \
      std::span<const T> mean, std::span<const T> rstd,                        \
      std::span<const T> dy, std::span<T> dx, std::span<T> dgamma,             \
      std::span<T> dbeta, std::size_t rows, std::size_t n) {                   \
    layer_norm_backward_impl<T>(x, gamma, mean, rstd, dy, dx, dgamma, dbeta,   \
                                rows, n);                                      \
  }                                                                            \
  void gelu(std::span<const T> x, std::span<T> y) { gelu_impl<T>(x, y); }      \
  void gelu_backward(std::span<const T> x, std::span<const T> dy,              \
                     std::span<T> dx) {                                        \
    gelu_backward_impl<T>(x, dy, dx);                                          \
  }

CCLF_DEFINE_SERIAL(float)
CCLF_DEFINE_SERIAL(double)

#undef CCLF_DEFINE_SERIAL

}  // namespace cclf::kernels::serial
