#include <benchmark/benchmark.h>

#include <random>

#include "netmf/factorize.hpp"
#include "netmf/generators.hpp"

namespace {

netmf::DenseMatrix random_matrix(netmf::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  netmf::DenseMatrix a(n, n);
  for (netmf::Index i = 0; i < n; ++i)
    for (netmf::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return a;
}

// Full path (BDCSVD) vs. randomized range finder at the same size.
void BM_TruncatedSvd(benchmark::State& state) {
  const auto n = static_cast<netmf::Index>(state.range(0));
  const netmf::DenseMatrix a = random_matrix(n, 7);
  netmf::SvdOptions opts;
  opts.full_threshold = state.range(1) ? 0 : n;
  for (auto _ : state) benchmark::DoNotOptimize(netmf::truncated_svd(a, 32, opts).u.data());
}
BENCHMARK(BM_TruncatedSvd)
    ->ArgsProduct({{300, 1000}, {0, 1}})
    ->ArgNames({"n", "randomized"})
    ->Unit(benchmark::kMillisecond);

void BM_NetmfApprox(benchmark::State& state) {
  const auto n = static_cast<netmf::Index>(state.range(0));
  const netmf::Graph g = netmf::random_connected_graph(n, 10.0 / static_cast<double>(n), 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(netmf::netmf_approx(g, 10, 1.0, 64, 32).vectors.data());
}
BENCHMARK(BM_NetmfApprox)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
