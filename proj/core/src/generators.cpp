#include "netmf/generators.hpp"

#include <random>
#include <string>

#include "netmf/errors.hpp"

namespace netmf {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Graph random_connected_graph(Index n, double p, std::uint64_t seed, bool weighted) {
  if (n < 2) throw ParameterError("random graph needs at least 2 vertices");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  auto weight = [&] { return weighted ? 0.5 + 1.5 * unit(rng) : 1.0; };
  std::vector<std::vector<bool>> linked(static_cast<std::size_t>(n),
                                        std::vector<bool>(static_cast<std::size_t>(n), false));
  std::vector<Edge> edges;
  for (Index v = 1; v < n; ++v) {
    const auto u = static_cast<Index>(unit(rng) * v);
    edges.push_back({u, v, weight()});
    linked[u][v] = true;
  }
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (!linked[u][v] && unit(rng) < p) edges.push_back({u, v, weight()});
  return graph_from_edges(n, edges);
}

LabeledGraph stochastic_block_model(const std::vector<Index>& block_sizes, double p_in,
                                    double p_out, std::uint64_t seed) {
  if (block_sizes.empty()) throw ParameterError("need at least one block");
  std::vector<Index> block;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (block_sizes[b] < 1) throw ParameterError("block sizes must be positive");
    block.insert(block.end(), static_cast<std::size_t>(block_sizes[b]), static_cast<Index>(b));
  }
  const auto n = static_cast<Index>(block.size());
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (unit(rng) < (block[u] == block[v] ? p_in : p_out)) edges.push_back({u, v, 1.0});

  LabeledGraph out{graph_from_edges(n, edges), {}};
  out.labels.num_vertices = n;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) out.labels.labels.intern("block" + std::to_string(b));
  out.labels.assignments.resize(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) out.labels.assignments[static_cast<std::size_t>(v)] = {block[v]};
  return out;
}

}  // namespace netmf
