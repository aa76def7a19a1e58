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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cclf/numerics/kernels.hpp"

namespace k = cclf::kernels;

namespace {

template <typename T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return v;
}

template <typename T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(double(a[i]) - double(b[i])));
  return worst;
}

}  // namespace

TEST_CASE_TEMPLATE("parallel gemm matches the serial reference", T, float, double) {
  std::mt19937_64 rng(11);
  const double tol = sizeof(T) == 4 ? 1e-4 : 1e-12;
  for (bool ta : {false, true})
    for (bool tb : {false, true})
      for (auto [m, n, kk] : {std::tuple{1ul, 1ul, 1ul}, {3ul, 5ul, 2ul},
                              {7ul, 1ul, 9ul}, {64ul, 48ul, 32ul}}) {
        const k::GemmShape s{m, n, kk, ta, tb};
        auto a = random_vec<T>(m * kk, rng);
        auto b = random_vec<T>(kk * n, rng);
        for (bool acc : {false, true}) {
          auto c0 = random_vec<T>(m * n, rng);
          auto c1 = c0;
          k::serial::gemm(s, std::span<const T>(a), std::span<const T>(b),
                            std::span<T>(c0), acc);
          k::parallel::gemm(s, std::span<const T>(a), std::span<const T>(b),
                              std::span<T>(c1), acc);
          CHECK(max_abs_diff(c0, c1) < tol);
        }
      }
}

TEST_CASE_TEMPLATE("parallel row kernels match the serial reference", T, float, double) {
  std::mt19937_64 rng(12);
  const double tol = sizeof(T) == 4 ? 1e-5 : 1e-12;
  for (auto [rows, n] : {std::pair{1ul, 1ul}, {5ul, 7ul}, {300ul, 129ul}}) {
    auto x = random_vec<T>(rows * n, rng);
    auto dy = random_vec<T>(rows * n, rng);
    auto gamma = random_vec<T>(n, rng);
    auto beta = random_vec<T>(n, rng);

    std::vector<T> y0(rows * n), y1(rows * n);
    k::serial::softmax_rows(std::span<const T>(x), std::span<T>(y0), rows, n);
    k::parallel::softmax_rows(std::span<const T>(x), std::span<T>(y1), rows, n);
    CHECK(max_abs_diff(y0, y1) < tol);

    std::vector<T> dx0(rows * n, T(0)), dx1(rows * n, T(0));
    k::serial::softmax_rows_backward(std::span<const T>(y0), std::span<const T>(dy),
                                     std::span<T>(dx0), rows, n);
    k::parallel::softmax_rows_backward(std::span<const T>(y0), std::span<const T>(dy),
                                       std::span<T>(dx1), rows, n);
    CHECK(max_abs_diff(dx0, dx1) < tol);

    std::vector<T> m0(rows), r0(rows), m1(rows), r1(rows);
    k::serial::layer_norm_rows(std::span<const T>(x), std::span<const T>(gamma),
                               std::span<const T>(beta), std::span<T>(y0),
                               std::span<T>(m0), std::span<T>(r0), rows, n, T(1e-5));
    k::parallel::layer_norm_rows(std::span<const T>(x), std::span<const T>(gamma),
                                 std::span<const T>(beta), std::span<T>(y1),
                                 std::span<T>(m1), std::span<T>(r1), rows, n, T(1e-5));
    CHECK(max_abs_diff(y0, y1) < tol);

    std::vector<T> g0(n, T(0)), g1(n, T(0)), b0(n, T(0)), b1(n, T(0));
    std::fill(dx0.begin(), dx0.end(), T(0));
    std::fill(dx1.begin(), dx1.end(), T(0));
    k::serial::layer_norm_rows_backward(
        std::span<const T>(x), std::span<const T>(gamma), std::span<const T>(m0),
        std::span<const T>(r0), std::span<const T>(dy), std::span<T>(dx0),
        std::span<T>(g0), std::span<T>(b0), rows, n);
    k::parallel::layer_norm_rows_backward(
        std::span<const T>(x), std::span<const T>(gamma), std::span<const T>(m0),
        std::span<const T>(r0), std::span<const T>(dy), std::span<T>(dx1),
        std::span<T>(g1), std::span<T>(b1), rows, n);
    CHECK(max_abs_diff(dx0, dx1) < tol * 10);
    CHECK(max_abs_diff(g0, g1) < tol * 100);
    CHECK(max_abs_diff(b0, b1) < tol * 100);

    k::serial::gelu(std::span<const T>(x), std::span<T>(y0));
    k::parallel::gelu(std::span<const T>(x), std::span<T>(y1));
    CHECK(max_abs_diff(y0, y1) < tol);
    std::fill(dx0.begin(), dx0.end(), T(0));
    std::fill(dx1.begin(), dx1.end(), T(0));
    k::serial::gelu_backward(std::span<const T>(x), std::span<const T>(dy),
                             std::span<T>(dx0));
    k::parallel::gelu_backward(std::span<const T>(x), std::span<const T>(dy),
                               std::span<T>(dx1));
    CHECK(max_abs_diff(dx0, dx1) < tol);
  }
}

TEST_CASE("backend switch is scoped") {
  CHECK(k::backend() == k::Backend::Parallel);
  {
    k::ScopedBackend guard(k::Backend::Serial);
    CHECK(k::backend() == k::Backend::Serial);
  }
  CHECK(k::backend() == k::Backend::Parallel);
}
