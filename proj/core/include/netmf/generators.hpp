#pragma once

#include <cstdint>
#include <vector>

#include "netmf/graph.hpp"

namespace netmf {

// Connected graph on vertices "0".."n-1": a random recursive tree plus every
// remaining pair independently with probability `p`. Weighted graphs draw
// weights uniformly from [0.5, 2).
Graph random_connected_graph(Index n, double p, std::uint64_t seed, bool weighted = false);

struct LabeledGraph {
  Graph graph;
  LabelSet labels;  // one label per vertex, "block<k>"
};

// Planted partition: pairs inside a block link with probability p_in, across
// blocks with p_out. Throws ValidationError if a vertex ends up isolated.
LabeledGraph stochastic_block_model(const std::vector<Index>& block_sizes, double p_in,
                                    double p_out, std::uint64_t seed);

}  // namespace netmf
