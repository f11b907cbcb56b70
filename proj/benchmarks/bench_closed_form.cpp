#include <benchmark/benchmark.h>

#include "netmf/closed_form.hpp"
#include "netmf/generators.hpp"

namespace {

void BM_DeepwalkMatrix(benchmark::State& state) {
  const netmf::Graph g = netmf::random_connected_graph(static_cast<netmf::Index>(state.range(0)),
                                                       8.0 / static_cast<double>(state.range(0)), 1);
  const int window = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(netmf::deepwalk_matrix(g, window, 1.0).values.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DeepwalkMatrix)
    ->ArgsProduct({{250, 500, 1000}, {1, 10}})
    ->Unit(benchmark::kMillisecond);

void BM_Node2vecMatrix(benchmark::State& state) {
  const netmf::Graph g = netmf::random_connected_graph(static_cast<netmf::Index>(state.range(0)),
                                                       8.0 / static_cast<double>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(netmf::node2vec_matrix(g, 0.5, 2.0, 10, 1.0).values.data());
}
BENCHMARK(BM_Node2vecMatrix)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
