#include <benchmark/benchmark.h>

#include <vector>

#include "adjsarah/dataset.hpp"
#include "adjsarah/numerics.hpp"
#include "adjsarah/shuffling.hpp"

namespace {

using namespace adjsarah;

std::vector<double> random_vector(std::size_t d, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> x(d);
  for (auto& v : x) v = rng.standard_normal();
  return x;
}

void BM_Dot(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(d, 1);
  const auto y = random_vector(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dot(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dot)->Arg(8)->Arg(300)->Arg(4096);

void BM_Axpy(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(d, 1);
  auto y = random_vector(d, 2);
  for (auto _ : state) {
    axpy_inplace(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Axpy)->Arg(8)->Arg(300)->Arg(4096);

// Dense rows take the contiguous path, every-third-index rows the gather.
void BM_SparseDot(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const bool dense = state.range(1) != 0;
  SparseExample e;
  SeededRng rng(3);
  for (std::size_t j = 0; j < d; j += dense ? 1 : 3) {
    e.indices.push_back(static_cast<FeatureIndex>(j));
    e.values.push_back(rng.standard_normal());
  }
  const auto w = random_vector(d, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sparse_dot(e.row(), w));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(e.indices.size()));
}
BENCHMARK(BM_SparseDot)->Args({300, 1})->Args({300, 0});

void BM_FisherYates(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> order(n);
  SeededRng rng(5);
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    fisher_yates(order, rng);
    benchmark::DoNotOptimize(order.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FisherYates)->Arg(1000)->Arg(50000);

}  // namespace
