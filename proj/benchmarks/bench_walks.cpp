#include <benchmark/benchmark.h>

#include "netmf/errors.hpp"
#include "netmf/generators.hpp"
#include "netmf/walk_sim.hpp"

namespace {

netmf::WalkParams params(std::int64_t walks) {
  netmf::WalkParams p;
  p.walks = static_cast<std::uint64_t>(walks);
  p.length = 40;
  p.window = 10;
  return p;
}

void BM_DeepwalkCorpus(benchmark::State& state) {
  netmf::set_warnings_enabled(false);
  const netmf::Graph g = netmf::random_connected_graph(static_cast<netmf::Index>(state.range(0)),
                                                       0.1, 5);
  for (auto _ : state) benchmark::DoNotOptimize(netmf::deepwalk_corpus(g, params(state.range(1))).total);
  state.SetItemsProcessed(state.iterations() * state.range(1) * 40);
}
BENCHMARK(BM_DeepwalkCorpus)
    ->ArgsProduct({{50, 500}, {1000, 10000}})
    ->Unit(benchmark::kMillisecond);

void BM_Node2vecCorpus(benchmark::State& state) {
  netmf::set_warnings_enabled(false);
  const netmf::Graph g = netmf::random_connected_graph(static_cast<netmf::Index>(state.range(0)),
                                                       0.1, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(netmf::node2vec_corpus(g, 0.5, 2.0, params(state.range(1))).total);
  state.SetItemsProcessed(state.iterations() * state.range(1) * 40);
}
BENCHMARK(BM_Node2vecCorpus)->ArgsProduct({{50}, {1000, 10000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
