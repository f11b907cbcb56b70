#include <benchmark/benchmark.h>

#include "netmf/generators.hpp"
#include "netmf/spectral.hpp"

namespace {

// Top-h Lanczos on a sparse normalized adjacency with average degree ~10.
void BM_TopEigenpairs(benchmark::State& state) {
  const auto n = static_cast<netmf::Index>(state.range(0));
  const netmf::Graph g = netmf::random_connected_graph(n, 10.0 / static_cast<double>(n), 3);
  const netmf::SparseMatrix s = netmf::normalized_adjacency(g);
  const auto h = static_cast<netmf::Index>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(netmf::top_eigenpairs(s, h).values.data());
}
BENCHMARK(BM_TopEigenpairs)
    ->ArgsProduct({{1000, 4000}, {16, 64}})
    ->Unit(benchmark::kMillisecond);

void BM_DenseEigenpairs(benchmark::State& state) {
  const auto n = static_cast<netmf::Index>(state.range(0));
  const netmf::Graph g = netmf::random_connected_graph(n, 10.0 / static_cast<double>(n), 4);
  const netmf::DenseMatrix s(netmf::normalized_adjacency(g));
  for (auto _ : state) benchmark::DoNotOptimize(netmf::dense_eigenpairs(s).values.data());
}
BENCHMARK(BM_DenseEigenpairs)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
