#include <benchmark/benchmark.h>

#include <vector>

#include "adjsarah/dataset.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace {

using namespace adjsarah;

const LogisticL2& blobs_problem() {
  static const LogisticL2 obj(generate_separable_blobs(5000, 50, 2.0, 42),
                              0.01);
  return obj;
}

// One outer iteration per benchmark iteration; every method costs 3n
// component gradients except SGD (n).
void BM_Epoch(benchmark::State& state) {
  const auto& obj = blobs_problem();
  const auto method = static_cast<Method>(state.range(0));
  std::vector<std::size_t> order(obj.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::vector<double> w(obj.dimension(), 0.0);
  const double eta = 0.01;
  for (auto _ : state) {
    EpochResult r;
    switch (method) {
      case Method::AdjSARAH:
        r = run_epoch_adjusted(obj, w, order, eta);
        break;
      case Method::RRSARAH:
        r = run_epoch_shuffled_sarah(obj, w, order, eta);
        break;
      default:
        r = run_epoch_shuffled_svrg(obj, w, order, eta);
        break;
    }
    benchmark::DoNotOptimize(r.iterate.data());
  }
  state.SetItemsProcessed(state.iterations() * 3 *
                          static_cast<long>(obj.size()));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Epoch)
    ->Arg(static_cast<int>(Method::AdjSARAH))
    ->Arg(static_cast<int>(Method::RRSARAH))
    ->Arg(static_cast<int>(Method::RRSVRG))
    ->Unit(benchmark::kMillisecond);

void BM_MetricsPass(benchmark::State& state) {
  const auto& obj = blobs_problem();
  const std::vector<double> w(obj.dimension(), 0.1);
  std::vector<double> g(obj.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(w, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(obj.size()));
}
BENCHMARK(BM_MetricsPass)->Unit(benchmark::kMillisecond);

}  // namespace
