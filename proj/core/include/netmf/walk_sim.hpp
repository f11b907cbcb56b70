#pragma once

#include <cstdint>
#include <vector>

#include "netmf/closed_form.hpp"
#include "netmf/graph.hpp"

namespace netmf {

// Sparse nonnegative counts over (row, col) pairs of an n x n grid, sorted
// by row-major key.
class PairCounts {
 public:
  struct Entry {
    std::uint64_t key;  // row * n + col
    std::uint64_t count;
  };

  PairCounts() = default;
  PairCounts(Index n, std::vector<Entry> entries);

  Index dimension() const noexcept { return n_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::uint64_t at(Index row, Index col) const;
  std::uint64_t total() const noexcept { return total_; }
  DenseMatrix to_dense() const;
  // Counts of (col, row) at (row, col).
  PairCounts transposed() const;

  friend bool operator==(const PairCounts& a, const PairCounts& b);

 private:
  Index n_ = 0;
  std::vector<Entry> entries_;
  std::uint64_t total_ = 0;
};

bool operator==(const PairCounts::Entry& a, const PairCounts::Entry& b);

enum class StartDistribution { kStationary, kUniform };

const char* to_string(StartDistribution start) noexcept;

// Pair statistics shared by both corpus kinds.
struct CorpusCounts {
  Index num_vertices = 0;
  int window = 1;
  std::uint64_t total = 0;  // |D|
  PairCounts pairs;         // #(w, c)
  std::vector<std::uint64_t> word_counts;     // #(w)
  std::vector<std::uint64_t> context_counts;  // #(c)
  // #(w, c)_r-> and #(w, c)_r<- for r = 1..T (index r - 1).
  std::vector<PairCounts> forward;
  std::vector<PairCounts> backward;
};

struct WalkParams {
  std::uint64_t walks = 1;  // N
  Index length = 2;         // L
  int window = 1;           // T
  std::uint64_t seed = 42;
};

struct WalkCorpus : CorpusCounts {
  WalkParams params;
  StartDistribution start = StartDistribution::kStationary;
};

struct TripletCorpus : CorpusCounts {
  WalkParams params;
  double p = 1.0;
  double q = 1.0;
  // #(w, c, u), keyed (w * n + c) * n + u, sorted by key.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> triplets;

  std::uint64_t triplet(Index w, Index c, Index u) const;
};

// Walks from independent per-walk generators seeded by (seed, walk index), so
// counts do not depend on the thread count. Throws ParameterError if L <= T.
// Warns when the graph is bipartite or disconnected.
WalkCorpus deepwalk_corpus(const Graph& graph, const WalkParams& params,
                           StartDistribution start = StartDistribution::kStationary);

// Second-order walks; the first state (w2, w1) is drawn from the edge-state
// stationary law.
TripletCorpus node2vec_corpus(const Graph& graph, double p, double q, const WalkParams& params,
                              const Node2vecOptions& options = {});

// ln(max(#(w,c)|D| / (b #(w) #(c)), 1)); zero where #(w,c) = 0.
ClosedFormMatrix empirical_sgns_matrix(const CorpusCounts& corpus, double negative);

// Limiting quantities a corpus should approach.
struct WalkTheory {
  int window = 1;
  double negative = 1.0;
  // Expected forward frequency per offset: F_r(w, c); backward is F_r^T.
  std::vector<DenseMatrix> offset_joints;
  DenseMatrix joint;      // (1/2T) sum_r (F_r + F_r^T)
  Vector marginal;        // row sums of joint
  DenseMatrix similarity; // joint / (b m_w m_c)
};

// F_r = diag(d/vol) P^r.
WalkTheory deepwalk_theory(const Graph& graph, int window, double negative);
WalkTheory node2vec_theory(const Graph& graph, double p, double q, int window, double negative,
                           const Node2vecOptions& options = {});

struct ConvergenceReport {
  double joint_l1 = 0.0;
  double joint_max = 0.0;
  std::vector<double> forward_l1;   // per offset r
  std::vector<double> backward_l1;  // per offset r
  double marginal_l1 = 0.0;
  // Max |empirical log-shifted - ln max(similarity, 1)| over pairs with
  // positive theoretical similarity and a nonzero count.
  double pmi_max = 0.0;
  std::size_t pmi_entries = 0;
};

// Throws ParameterError when the corpus and the theory disagree in n or T.
ConvergenceReport convergence_report(const CorpusCounts& corpus, const WalkTheory& theory);

// Empirical joint #(w, c) / |D| as a dense matrix.
DenseMatrix empirical_joint(const CorpusCounts& corpus);

}  // namespace netmf
