#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace netmf {

using Index = int;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bijection between string tokens and dense indices [0, size()).
// Indices are assigned in first-insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  // Returns the index of `token`, inserting it if absent.
  Index intern(std::string_view token);
  std::optional<Index> find(std::string_view token) const;

  const std::string& token(Index i) const { return tokens_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  Index size() const noexcept { return static_cast<Index>(tokens_.size()); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Index> index_;
};

enum class IsolatedPolicy { kReject, kDrop };

// Undirected weighted graph. Immutable after construction.
//
// Invariants: the adjacency is symmetric with nonnegative stored weights,
// every degree d_i = sum_j A_ij is positive, and volume() equals the sum of
// degrees in index order. Self-loops are kept and counted once in the row sum.
class Graph {
 public:
  // Builds from a symmetric adjacency. Throws ValidationError on asymmetry,
  // negative weights, size mismatch with the vocabulary, or zero degree.
  Graph(Vocabulary vocabulary, SparseMatrix adjacency);

  Index num_vertices() const noexcept { return static_cast<Index>(adjacency_.rows()); }
  // Number of undirected edges, self-loops included.
  std::size_t num_edges() const noexcept { return num_edges_; }
  // Number of stored (directed) nonzeros.
  std::size_t num_nonzeros() const noexcept {
    return static_cast<std::size_t>(adjacency_.nonZeros());
  }

  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Vector& degrees() const noexcept { return degrees_; }
  double degree(Index v) const { return degrees_[v]; }
  double volume() const noexcept { return volume_; }
  double min_degree() const noexcept { return min_degree_; }
  double max_degree() const noexcept { return max_degree_; }
  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }

  // A_{u,v}; zero when no edge is stored. O(log deg(u)).
  double weight(Index u, Index v) const;

  bool is_connected() const;
  // Two-colourable, i.e. the random walk on it is periodic.
  bool is_bipartite() const;

 private:
  Vocabulary vocabulary_;
  SparseMatrix adjacency_;
  Vector degrees_;
  double volume_ = 0.0;
  double min_degree_ = 0.0;
  double max_degree_ = 0.0;
  std::size_t num_edges_ = 0;
};

// Rectangular nonnegative adjacency between a row part and a column part.
class BipartiteGraph {
 public:
  BipartiteGraph(Vocabulary rows, Vocabulary cols, SparseMatrix adjacency);

  Index num_rows() const noexcept { return static_cast<Index>(adjacency_.rows()); }
  Index num_cols() const noexcept { return static_cast<Index>(adjacency_.cols()); }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Vector& row_degrees() const noexcept { return row_degrees_; }
  const Vector& col_degrees() const noexcept { return col_degrees_; }
  double volume() const noexcept { return volume_; }
  const Vocabulary& row_vocabulary() const noexcept { return rows_; }
  const Vocabulary& col_vocabulary() const noexcept { return cols_; }

 private:
  Vocabulary rows_;
  Vocabulary cols_;
  SparseMatrix adjacency_;
  Vector row_degrees_;
  Vector col_degrees_;
  double volume_ = 0.0;
};

// Multi-label assignment over vertex indices.
struct LabelSet {
  Index num_vertices = 0;
  Vocabulary labels;
  // Sorted, duplicate-free label indices per vertex; empty = unlabeled.
  std::vector<std::vector<Index>> assignments;

  Index num_labels() const noexcept { return labels.size(); }
  std::vector<Index> labeled_vertices() const;
};

// Edge-list text: "src dst [weight]" per line, '#' starts a comment, blank
// lines ignored. Duplicate edges sum. Zero-weight edges are not stored.
Graph load_edge_list(std::istream& in, IsolatedPolicy policy = IsolatedPolicy::kReject);
Graph load_edge_list_file(const std::string& path,
                          IsolatedPolicy policy = IsolatedPolicy::kReject);

// Writes each undirected edge once with full precision. Lines are ordered so
// that reloading reproduces the same vertex indices whenever the index order
// is a first-appearance order (always true for graphs from load_edge_list).
void write_edge_list(const Graph& graph, std::ostream& out);

// Sidecar format: "index<TAB>token" per line.
void write_vocabulary(const Vocabulary& vocabulary, std::ostream& out);

// Bipartite edge list "row col [weight]". When `cols` is given, column
// tokens must already exist in it and the column dimension is fixed to it.
BipartiteGraph load_bipartite_edge_list(std::istream& in,
                                        const Vocabulary* cols = nullptr);

// Label file "vertex label" per line (repeats allowed). Vertices unknown to
// `vertices` are skipped with a warning.
LabelSet load_labels(std::istream& in, const Vocabulary& vertices);
LabelSet load_labels_file(const std::string& path, const Vocabulary& vertices);

// Induced subgraph on the largest connected component; ties go to the
// component holding the smallest original index. Relative vertex order is
// kept, so the token map carries over.
Graph largest_connected_component(const Graph& graph);

// P = D^{-1} A.
SparseMatrix transition_matrix(const Graph& graph);

// S = D^{-1/2} A D^{-1/2}, exactly symmetric.
SparseMatrix normalized_adjacency(const Graph& graph);

// Graph from an explicit list of undirected weighted edges over vertices
// named "0".."n-1" (used by generators and tests).
struct Edge {
  Index u;
  Index v;
  double weight = 1.0;
};
Graph graph_from_edges(Index n, const std::vector<Edge>& edges,
                       IsolatedPolicy policy = IsolatedPolicy::kReject);

}  // namespace netmf
