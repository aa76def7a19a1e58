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

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>

#include "cclf/numerics/kernels.hpp"

namespace cclf::kernels {
namespace {

std::atomic<Backend> g_backend{Backend::Parallel};

// Below this many multiply-adds (or elements) the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1 << 15;

template <typename T>
void gemm_impl(const GemmShape& s, std::span<const T> a_span,
               std::span<const T> b_span, std::span<T> c_span,
               bool accumulate) {
  const T* a = a_span.data();
  const T* b = b_span.data();
  T* c = c_span.data();
  const auto m = static_cast<std::int64_t>(s.m);
  const std::size_t n = s.n;
  const std::size_t k = s.k;
  const bool big = s.m * s.n * s.k >= kParallelWork;

  if (!s.trans_a && !s.trans_b) {
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t i = 0; i < m; ++i) {
      T* row = c + i * n;
      if (!accumulate) std::fill(row, row + n, T(0));
      const T* arow = a + i * k;
      for (std::size_t p = 0; p < k; ++p) {
        const T av = arow[p];
        const T* brow = b + p * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
      }
    }
  } else if (!s.trans_a && s.trans_b) {
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t i = 0; i < m; ++i) {
      const T* arow = a + i * k;
      T* row = c + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const T* brow = b + j * k;
        T acc = 0;
#pragma omp simd reduction(+ : acc)
        for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
        row[j] = accumulate ? row[j] + acc : acc;
      }
    }
  } else if (s.trans_a && !s.trans_b) {
    const std::size_t mm = s.m;
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t i = 0; i < m; ++i) {
      T* row = c + i * n;
      if (!accumulate) std::fill(row, row + n, T(0));
      for (std::size_t p = 0; p < k; ++p) {
        const T av = a[p * mm + i];
        const T* brow = b + p * n;
#pragma omp simd
        for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
      }
    }
  } else {
    const std::size_t mm = s.m;
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t i = 0; i < m; ++i) {
      T* row = c + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        T acc = 0;
        for (std::size_t p = 0; p < k; ++p) acc += a[p * mm + i] * b[j * k + p];
        row[j] = accumulate ? row[j] + acc : acc;
      }
    }
  }
}

template <typename T>
void softmax_impl(std::span<const T> x, std::span<T> y, std::size_t rows,
                  std::size_t n) {
  const auto r_end = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * n >= kParallelWork)
  for (std::int64_t r = 0; r < r_end; ++r) {
    const T* in = x.data() + r * n;
    T* out = y.data() + r * n;
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, in[j]);
    T total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = std::exp(in[j] - mx);
      total += out[j];
    }
    const T inv = T(1) / total;
    for (std::size_t j = 0; j < n; ++j) out[j] *= inv;
  }
}

template <typename T>
void softmax_backward_impl(std::span<const T> y, std::span<const T> dy,
                           std::span<T> dx, std::size_t rows, std::size_t n) {
  const auto r_end = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * n >= kParallelWork)
  for (std::int64_t r = 0; r < r_end; ++r) {
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
  const auto r_end = static_cast<std::int64_t>(rows);
  const T inv_n = T(1) / static_cast<T>(n);
#pragma omp parallel for schedule(static) if (rows * n >= kParallelWork)
  for (std::int64_t r = 0; r < r_end; ++r) {
    const T* in = x.data() + r * n;
    T* out = y.data() + r * n;
    T mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += in[j];
    mu *= inv_n;
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (in[j] - mu) * (in[j] - mu);
    var *= inv_n;
    const T inv = T(1) / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = (in[j] - mu) * inv * gamma[j] + beta[j];
    }
  }
}

template <typename T>
void layer_norm_backward_impl(std::span<const T> x, std::span<const T> gamma,
                              std::span<const T> mean, std::span<const T> rstd,
                              std::span<const T> dy, std::span<T> dx,
                              std::span<T> dgamma, std::span<T> dbeta,
                              std::size_t rows, std::size_t n) {
  const bool big = rows * n >= kParallelWork;
  if (!dx.empty()) {
    const auto r_end = static_cast<std::int64_t>(rows);
    const T inv_n = T(1) / static_cast<T>(n);
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t r = 0; r < r_end; ++r) {
      const std::size_t base = r * n;
      T sum_g = 0;
      T sum_gx = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const T xhat = (x[base + j] - mean[r]) * rstd[r];
        const T g = dy[base + j] * gamma[j];
        sum_g += g;
        sum_gx += g * xhat;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const T xhat = (x[base + j] - mean[r]) * rstd[r];
        const T g = dy[base + j] * gamma[j];
        dx[base + j] += rstd[r] * (g - sum_g * inv_n - xhat * sum_gx * inv_n);
      }
    }
  }
  if (dgamma.empty() && dbeta.empty()) return;
  // Column-parallel so each parameter gradient has one writer.
  const auto c_end = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t j = 0; j < c_end; ++j) {
    T g_acc = 0;
    T b_acc = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const T d = dy[r * n + j];
      g_acc += d * (x[r * n + j] - mean[r]) * rstd[r];
      b_acc += d;
    }
    if (!dgamma.empty()) dgamma[j] += g_acc;
    if (!dbeta.empty()) dbeta[j] += b_acc;
  }
}

template <typename T>
void gelu_impl(std::span<const T> x, std::span<T> y) {
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  const auto count = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelWork)
  for (std::int64_t i = 0; i < count; ++i) {
    y[i] = T(0.5) * x[i] * (T(1) + std::erf(x[i] * inv_sqrt2));
  }
}

template <typename T>
void gelu_backward_impl(std::span<const T> x, std::span<const T> dy,
                        std::span<T> dx) {
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  const T inv_sqrt2pi = T(1) / std::sqrt(T(2) * T(3.14159265358979323846));
  const auto count = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelWork)
  for (std::int64_t i = 0; i < count; ++i) {
    const T cdf = T(0.5) * (T(1) + std::erf(x[i] * inv_sqrt2));
    const T pdf = inv_sqrt2pi * std::exp(T(-0.5) * x[i] * x[i]);
    dx[i] += dy[i] * (cdf + x[i] * pdf);
  }
}

}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

ScopedSingleThread::ScopedSingleThread() : previous_(omp_get_max_threads()) {
  omp_set_num_threads(1);
}
ScopedSingleThread::~ScopedSingleThread() { omp_set_num_threads(previous_); }

namespace parallel {

#define CCLF_DEFINE_PARALLEL(T)                                                \
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

CCLF_DEFINE_PARALLEL(float)
CCLF_DEFINE_PARALLEL(double)

#undef CCLF_DEFINE_PARALLEL

}  // namespace parallel

#define CCLF_DEFINE_DISPATCH(T)                                                \
  void gemm(const GemmShape& shape, std::span<const T> a,                      \
            std::span<const T> b, std::span<T> c, bool accumulate) {           \
    if (backend() == Backend::Serial) {                                        \
      serial::gemm(shape, a, b, c, accumulate);                                \
    } else {                                                                   \
      parallel::gemm(shape, a, b, c, accumulate);                              \
    }                                                                          \
  }                                                                            \
  void softmax_rows(std::span<const T> x, std::span<T> y, std::size_t rows,    \
                    std::size_t n) {                                           \
    if (backend() == Backend::Serial) {                                        \
      serial::softmax_rows(x, y, rows, n);                                     \
    } else {                                                                   \
      parallel::softmax_rows(x, y, rows, n);                                   \
    }                                                                          \
  }                                                                            \
  void softmax_rows_backward(std::span<const T> y, std::span<const T> dy,      \
                             std::span<T> dx, std::size_t rows,                \
                             std::size_t n) {                                  \
    if (backend() == Backend::Serial) {                                        \
      serial::softmax_rows_backward(y, dy, dx, rows, n);                       \
    } else {                                                                   \
      parallel::softmax_rows_backward(y, dy, dx, rows, n);                     \
    }                                                                          \
  }                                                                            \
  void layer_norm_rows(std::span<const T> x, std::span<const T> gamma,         \
                       std::span<const T> beta, std::span<T> y,                \
                       std::span<T> mean, std::span<T> rstd, std::size_t rows, \
                       std::size_t n, T eps) {                                 \
    if (backend() == Backend::Serial) {                                        \
      serial::layer_norm_rows(x, gamma, beta, y, mean, rstd, rows, n, eps);    \
    } else {                                                                   \
      parallel::layer_norm_rows(x, gamma, beta, y, mean, rstd, rows, n, eps);  \
    }                                                                          \
  }                                                                            \
  void layer_norm_rows_backward(                                               \
      std::span<const T> x, std::span<const T> gamma,                          \
      std::span<const T> mean, std::span<const T> rstd,                        \
      std::span<const T> dy, std::span<T> dx, std::span<T> dgamma,             \
      std::span<T> dbeta, std::size_t rows, std::size_t n) {                   \
    if (backend() == Backend::Serial) {                                        \
      serial::layer_norm_rows_backward(x, gamma, mean, rstd, dy, dx, dgamma,   \
                                       dbeta, rows, n);                        \
    } else {                                                                   \
      parallel::layer_norm_rows_backward(x, gamma, mean, rstd, dy, dx, dgamma, \
                                         dbeta, rows, n);                      \
    }                                                                          \
  }                                                                            \
  void gelu(std::span<const T> x, std::span<T> y) {                            \
    if (backend() == Backend::Serial) {                                        \
      serial::gelu(x, y);                                                      \
    } else {                                                                   \
      parallel::gelu(x, y);                                                    \
    }                                                                          \
  }                                                                            \
  void gelu_backward(std::span<const T> x, std::span<const T> dy,              \
                     std::span<T> dx) {                                        \
    if (backend() == Backend::Serial) {                                        \
      serial::gelu_backward(x, dy, dx);                                        \
    } else {                                                                   \
      parallel::gelu_backward(x, dy, dx);                                      \
    }                                                                          \
  }

CCLF_DEFINE_DISPATCH(float)
CCLF_DEFINE_DISPATCH(double)

#undef CCLF_DEFINE_DISPATCH

}  // namespace cclf::kernels
