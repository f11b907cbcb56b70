#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netmf/graph.hpp"

namespace netmf {

enum class MatrixKind {
  kSimilarity,  // M, entries >= 0 for exact closed forms
  kShifted,     // M' = max(M, 1)
  kLogShifted,  // log M'
};

const char* to_string(MatrixKind kind) noexcept;

// Model name plus the parameters that produced a matrix, in insertion order.
struct Provenance {
  std::string model;
  std::vector<std::pair<std::string, std::string>> params;

  Provenance& set(const std::string& key, double value);
  Provenance& set(const std::string& key, std::string value);
  // "model=<m> k1=v1 k2=v2 ..."
  std::string describe() const;
};

struct ClosedFormMatrix {
  DenseMatrix values;
  MatrixKind kind = MatrixKind::kSimilarity;
  Provenance provenance;
};

// Size guards for the dense paths. Exceeding one raises CapacityError.
struct DenseLimits {
  Index max_vertices = 20000;
  std::size_t max_edge_states = 20000;
};

// vol(G) A_ij / (b d_i d_j).
ClosedFormMatrix line_matrix(const Graph& graph, double negative, const DenseLimits& limits = {});

// P, P^2, ..., P^T as dense matrices (row-parallel, deterministic).
std::vector<DenseMatrix> transition_powers(const Graph& graph, int window,
                                           const DenseLimits& limits = {});

// vol(G)/(bT) (sum_{r=1..T} P^r) D^{-1}.
ClosedFormMatrix deepwalk_matrix(const Graph& graph, int window, double negative,
                                 const DenseLimits& limits = {});

// Sub-network weights for the joint word/document/label factorization.
struct PteWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  // alpha = 1, beta = vol(ww)/vol(dw), gamma = vol(ww)/vol(lw), so that
  // alpha vol(ww) = beta vol(dw) = gamma vol(lw) = vol(ww).
  static PteWeights balanced(const Graph& ww, const BipartiteGraph& dw,
                             const BipartiteGraph& lw);
};

// Vertical stack [word-word; doc-word; label-word] of
// weight * vol * D_row^{-1} A D_col^{-1} / b, shape (#word+#doc+#label) x #word.
ClosedFormMatrix pte_matrix(const Graph& ww, const BipartiteGraph& dw, const BipartiteGraph& lw,
                            std::optional<PteWeights> weights, double negative,
                            const DenseLimits& limits = {});

// Second-order (node2vec) random walk lifted to a first-order chain over
// directed-edge states (current v, previous w) with A_{v,w} > 0.
//
// From state (v, w) the walk moves to (u, v) with probability proportional
// to A_{v,u} times 1/p if u == w, 1 if A_{w,u} > 0, and 1/q otherwise.
class SecondOrderChain {
 public:
  struct State {
    Index current;
    Index previous;
  };

  SecondOrderChain(const Graph& graph, double p, double q, const DenseLimits& limits = {});

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  Index num_vertices() const noexcept { return num_vertices_; }
  Index num_states() const noexcept { return static_cast<Index>(states_.size()); }
  const State& state(Index s) const { return states_[static_cast<std::size_t>(s)]; }
  const std::vector<State>& states() const noexcept { return states_; }
  // States are grouped by current vertex: those with current v occupy
  // [first_state(v), first_state(v+1)).
  Index first_state(Index v) const { return offsets_[static_cast<std::size_t>(v)]; }
  std::optional<Index> find_state(Index current, Index previous) const;
  // Row-stochastic transition matrix over states.
  const SparseMatrix& step() const noexcept { return step_; }
  // A_{v,w} for every state (v, w).
  const Vector& edge_weights() const noexcept { return edge_weights_; }

 private:
  double p_;
  double q_;
  Index num_vertices_;
  std::vector<State> states_;
  std::vector<Index> offsets_;
  Vector edge_weights_;
  SparseMatrix step_;
};

inline SecondOrderChain second_order_chain(const Graph& graph, double p, double q,
                                           const DenseLimits& limits = {}) {
  return SecondOrderChain(graph, p, q, limits);
}

// Stationary law X over edge states: X_{u,v} = sum_w P_{u,v,w} X_{v,w}.
struct EdgeDistribution {
  Vector probabilities;
  double residual = 0.0;  // || X - step^T X ||_1
  int iterations = 0;

  // sum_u X_{w,u} for every vertex w.
  Vector vertex_marginal(const SecondOrderChain& chain) const;
};

// Power iteration started from the first-order edge law A_{v,w}/vol(G),
// which is already the fixed point when p = q = 1. Throws ConvergenceError
// (carrying the residual) when tol is not reached within max_iter steps.
EdgeDistribution stationary_distribution(const SecondOrderChain& chain, double tol = 1e-12,
                                         int max_iter = 200000);

// F_r(w, c) = sum_u X_{w,u} Prob(w_{j+r} = c | w_j = w, w_{j-1} = u), for
// r = 1..T. Computed by pushing each source vertex's X mass through the
// sparse step r times; the dense transition tensor is never formed.
std::vector<DenseMatrix> node2vec_offset_joints(const SecondOrderChain& chain,
                                                const EdgeDistribution& x, int window);

// (1/(2T)) sum_r (F_r(w,c) + F_r(c,w)): the limiting pair frequency.
DenseMatrix node2vec_joint(const SecondOrderChain& chain, const EdgeDistribution& x, int window);

struct Node2vecOptions {
  double stationary_tol = 1e-12;
  int stationary_max_iter = 200000;
  DenseLimits limits;
};

// node2vec_joint(w,c) / (b m_w m_c) with m_w = sum_u X_{w,u}.
ClosedFormMatrix node2vec_matrix(const Graph& graph, double p, double q, int window,
                                 double negative, const Node2vecOptions& options = {});

}  // namespace netmf
