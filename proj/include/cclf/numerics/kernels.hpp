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

// Dense inner-loop kernels behind the tensor ops.
//
// Two implementations share one signature set:
//   serial::   straightforward reference loops, kept for testing and benchmarks
//   parallel:: OpenMP row-parallel versions used in training and inference
//
// Every parallel kernel partitions work by output element (or row) and keeps
// the per-element reduction order fixed, so results do not depend on the
// thread count.
//
// Backward kernels accumulate into their gradient outputs.

#include <cstddef>
#include <span>

namespace cclf::kernels {

enum class Backend { Serial, Parallel };

void set_backend(Backend backend);
Backend backend();

class ScopedBackend {
 public:
  explicit ScopedBackend(Backend backend) : previous_(kernels::backend()) {
    set_backend(backend);
  }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

// Limits OpenMP to one thread for the guard's lifetime. Used by runtime
// measurement.
class ScopedSingleThread {
 public:
  ScopedSingleThread();
  ~ScopedSingleThread();
  ScopedSingleThread(const ScopedSingleThread&) = delete;
  ScopedSingleThread& operator=(const ScopedSingleThread&) = delete;

 private:
  int previous_;
};

// Shape of a general matrix product C[m x n] (+)= op(A)[m x k] * op(B)[k x n].
// A is stored [m x k] row-major, or [k x m] when trans_a. B is stored [k x n],
// or [n x k] when trans_b.
struct GemmShape {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  bool trans_a = false;
  bool trans_b = false;
};

#define CCLF_DECLARE_KERNELS(T)                                                \
  void gemm(const GemmShape& shape, std::span<const T> a,                      \
            std::span<const T> b, std::span<T> c, bool accumulate);            \
  void softmax_rows(std::span<const T> x, std::span<T> y, std::size_t rows,    \
                    std::size_t n);                                            \
  void softmax_rows_backward(std::span<const T> y, std::span<const T> dy,      \
                             std::span<T> dx, std::size_t rows,                \
                             std::size_t n);                                   \
  void layer_norm_rows(std::span<const T> x, std::span<const T> gamma,         \
                       std::span<const T> beta, std::span<T> y,                \
                       std::span<T> mean, std::span<T> rstd, std::size_t rows, \
                       std::size_t n, T eps);                                  \
  void layer_norm_rows_backward(                                               \
      std::span<const T> x, std::span<const T> gamma,                          \
      std::span<const T> mean, std::span<const T> rstd,                        \
      std::span<const T> dy, std::span<T> dx, std::span<T> dgamma,             \
      std::span<T> dbeta, std::size_t rows, std::size_t n);                    \
  void gelu(std::span<const T> x, std::span<T> y);                             \
  void gelu_backward(std::span<const T> x, std::span<const T> dy,              \
                     std::span<T> dx);

namespace serial {
CCLF_DECLARE_KERNELS(float)
CCLF_DECLARE_KERNELS(double)
}  // namespace serial

namespace parallel {
CCLF_DECLARE_KERNELS(float)
CCLF_DECLARE_KERNELS(double)
}  // namespace parallel

// Dispatch to the active backend.
CCLF_DECLARE_KERNELS(float)
CCLF_DECLARE_KERNELS(double)

#undef CCLF_DECLARE_KERNELS

}  // namespace cclf::kernels
