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

// Serial reference kernels against their OpenMP counterparts, at the shapes
// the desk-scale encoder produces (batch 16, length ~32, width 64, ff 256).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cclf/numerics/kernels.hpp"

namespace k = cclf::kernels;

namespace {

std::vector<float> random_vec(std::size_t n) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<float> dist(-1.f, 1.f);
  std::vector<float> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto kk = static_cast<std::size_t>(state.range(2));
  const bool trans_b = state.range(3) != 0;
  auto a = random_vec(m * kk);
  auto b = random_vec(kk * n);
  std::vector<float> c(m * n);
  const k::GemmShape shape{m, n, kk, false, trans_b};
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::gemm(shape, std::span<const float>(a), std::span<const float>(b),
                        std::span<float>(c), false);
    } else {
      k::serial::gemm(shape, std::span<const float>(a), std::span<const float>(b),
                      std::span<float>(c), false);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * m * n * kk));
}

template <bool Parallel>
void BM_LayerNorm(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 64;
  auto x = random_vec(rows * n);
  auto g = random_vec(n);
  auto b = random_vec(n);
  std::vector<float> y(rows * n), mean(rows), rstd(rows);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::layer_norm_rows(std::span<const float>(x), std::span<const float>(g),
                                   std::span<const float>(b), std::span<float>(y),
                                   std::span<float>(mean), std::span<float>(rstd),
                                   rows, n, 1e-5f);
    } else {
      k::serial::layer_norm_rows(std::span<const float>(x), std::span<const float>(g),
                                 std::span<const float>(b), std::span<float>(y),
                                 std::span<float>(mean), std::span<float>(rstd),
                                 rows, n, 1e-5f);
    }
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_Softmax(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 32;
  auto x = random_vec(rows * n);
  std::vector<float> y(rows * n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::softmax_rows(std::span<const float>(x), std::span<float>(y), rows, n);
    } else {
      k::serial::softmax_rows(std::span<const float>(x), std::span<float>(y), rows, n);
    }
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_Gelu(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto x = random_vec(n);
  std::vector<float> y(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::gelu(std::span<const float>(x), std::span<float>(y));
    } else {
      k::serial::gelu(std::span<const float>(x), std::span<float>(y));
    }
    benchmark::DoNotOptimize(y.data());
  }
}

void GemmArgs(benchmark::internal::Benchmark* b) {
  b->Args({512, 64, 64, 0})    // projection
      ->Args({512, 256, 64, 0})  // feed-forward up
      ->Args({512, 64, 256, 0})  // feed-forward down
      ->Args({32, 32, 16, 1});   // per-head attention scores
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Apply(GemmArgs);
BENCHMARK(BM_Gemm<true>)->Apply(GemmArgs);
BENCHMARK(BM_LayerNorm<false>)->Arg(512)->Arg(4096);
BENCHMARK(BM_LayerNorm<true>)->Arg(512)->Arg(4096);
BENCHMARK(BM_Softmax<false>)->Arg(2048)->Arg(16384);
BENCHMARK(BM_Softmax<true>)->Arg(2048)->Arg(16384);
BENCHMARK(BM_Gelu<false>)->Arg(1 << 17);
BENCHMARK(BM_Gelu<true>)->Arg(1 << 17);

BENCHMARK_MAIN();
