#include "netmf/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include "netmf/errors.hpp"

namespace netmf {

// ---------------------------------------------------------------- Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  tokens_.reserve(tokens.size());
  for (auto& t : tokens) {
    if (index_.count(t) != 0) throw ValidationError("duplicate token '" + t + "'");
    index_.emplace(t, static_cast<Index>(tokens_.size()));
    tokens_.push_back(std::move(t));
  }
}

Index Vocabulary::intern(std::string_view token) {
  std::string key(token);
  auto [it, inserted] = index_.try_emplace(key, static_cast<Index>(tokens_.size()));
  if (inserted) tokens_.push_back(std::move(key));
  return it->second;
}

std::optional<Index> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// --------------------------------------------------------------------- Graph

Graph::Graph(Vocabulary vocabulary, SparseMatrix adjacency)
    : vocabulary_(std::move(vocabulary)), adjacency_(std::move(adjacency)) {
  adjacency_.makeCompressed();
  const Index n = static_cast<Index>(adjacency_.rows());
  if (adjacency_.cols() != n) throw ValidationError("adjacency must be square");
  if (vocabulary_.size() != n)
    throw ValidationError("vocabulary size " + std::to_string(vocabulary_.size()) +
                          " does not match vertex count " + std::to_string(n));

  degrees_ = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    double d = 0.0;
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) {
      const double w = it.value();
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("invalid edge weight at (" + vocabulary_.token(i) + ", " +
                              vocabulary_.token(it.col()) + ")");
      if (weight(it.col(), i) != w)
        throw ValidationError("adjacency is not symmetric at (" + vocabulary_.token(i) +
                              ", " + vocabulary_.token(it.col()) + ")");
      if (it.col() >= i) ++num_edges_;
      d += w;
    }
    if (!(d > 0.0)) throw ValidationError("vertex '" + vocabulary_.token(i) + "' is isolated");
    degrees_[i] = d;
  }
  volume_ = 0.0;
  for (Index i = 0; i < n; ++i) volume_ += degrees_[i];
  min_degree_ = n > 0 ? degrees_.minCoeff() : 0.0;
  max_degree_ = n > 0 ? degrees_.maxCoeff() : 0.0;
}

double Graph::weight(Index u, Index v) const {
  const auto* outer = adjacency_.outerIndexPtr();
  const auto* inner = adjacency_.innerIndexPtr();
  const auto* begin = inner + outer[u];
  const auto* end = inner + outer[u + 1];
  const auto* it = std::lower_bound(begin, end, v);
  if (it == end || *it != v) return 0.0;
  return adjacency_.valuePtr()[it - inner];
}

namespace {

// Component id per vertex, numbered in order of their smallest vertex.
std::vector<Index> component_ids(const SparseMatrix& adj, Index* count) {
  const Index n = static_cast<Index>(adj.rows());
  std::vector<Index> comp(static_cast<std::size_t>(n), -1);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (SparseMatrix::InnerIterator it(adj, v); it; ++it) {
        if (comp[it.col()] == -1) {
          comp[it.col()] = next;
          stack.push_back(it.col());
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

}  // namespace

bool Graph::is_connected() const {
  Index count = 0;
  component_ids(adjacency_, &count);
  return count <= 1;
}

bool Graph::is_bipartite() const {
  const Index n = num_vertices();
  std::vector<int> colour(static_cast<std::size_t>(n), -1);
  std::queue<Index> queue;
  for (Index s = 0; s < n; ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      const Index v = queue.front();
      queue.pop();
      for (SparseMatrix::InnerIterator it(adjacency_, v); it; ++it) {
        const Index u = it.col();
        if (colour[u] == -1) {
          colour[u] = 1 - colour[v];
          queue.push(u);
        } else if (colour[u] == colour[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

// ------------------------------------------------------------ BipartiteGraph

BipartiteGraph::BipartiteGraph(Vocabulary rows, Vocabulary cols, SparseMatrix adjacency)
    : rows_(std::move(rows)), cols_(std::move(cols)), adjacency_(std::move(adjacency)) {
  adjacency_.makeCompressed();
  if (rows_.size() != adjacency_.rows() || cols_.size() != adjacency_.cols())
    throw ValidationError("bipartite vocabulary sizes do not match adjacency shape");
  row_degrees_ = Vector::Zero(adjacency_.rows());
  col_degrees_ = Vector::Zero(adjacency_.cols());
  for (Index i = 0; i < adjacency_.rows(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) {
      if (!(it.value() >= 0.0) || !std::isfinite(it.value()))
        throw ValidationError("invalid bipartite edge weight in row '" + rows_.token(i) + "'");
      row_degrees_[i] += it.value();
      col_degrees_[it.col()] += it.value();
    }
  }
  volume_ = 0.0;
  for (Index i = 0; i < row_degrees_.size(); ++i) volume_ += row_degrees_[i];
}

std::vector<Index> LabelSet::labeled_vertices() const {
  std::vector<Index> out;
  for (std::size_t v = 0; v < assignments.size(); ++v)
    if (!assignments[v].empty()) out.push_back(static_cast<Index>(v));
  return out;
}

// ------------------------------------------------------------------- parsing

namespace {

using Triplet = Eigen::Triplet<double, Index>;

// Splits a line into whitespace-separated fields after stripping comments.
std::vector<std::string_view> fields_of(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_weight(std::string_view text, std::size_t line_no) {
  double w = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, w);
  if (ec != std::errc() || ptr != last)
    throw FormatError("cannot parse weight '" + std::string(text) + "'", line_no);
  if (!std::isfinite(w)) throw FormatError("non-finite weight", line_no);
  if (w < 0.0) throw FormatError("negative weight " + std::string(text), line_no);
  return w;
}

SparseMatrix assemble(Index rows, Index cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune([](Index, Index, double v) { return v != 0.0; });
  m.makeCompressed();
  return m;
}

Graph finish_graph(Vocabulary vocab, SparseMatrix adj, IsolatedPolicy policy) {
  const Index n = static_cast<Index>(adj.rows());
  std::vector<Index> isolated;
  for (Index i = 0; i < n; ++i) {
    double d = 0.0;
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it) d += it.value();
    if (!(d > 0.0)) isolated.push_back(i);
  }
  if (isolated.empty()) return Graph(std::move(vocab), std::move(adj));
  if (policy == IsolatedPolicy::kReject)
    throw ValidationError("vertex '" + vocab.token(isolated.front()) +
                          "' is isolated (zero degree); use the drop policy to remove it");

  std::vector<Index> remap(static_cast<std::size_t>(n), -1);
  std::vector<std::string> kept_tokens;
  std::size_t iso = 0;
  for (Index i = 0; i < n; ++i) {
    if (iso < isolated.size() && isolated[iso] == i) {
      ++iso;
      continue;
    }
    remap[i] = static_cast<Index>(kept_tokens.size());
    kept_tokens.push_back(vocab.token(i));
  }
  std::vector<Triplet> triplets;
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it)
      triplets.emplace_back(remap[i], remap[it.col()], it.value());
  const Index m = static_cast<Index>(kept_tokens.size());
  warn("dropped " + std::to_string(isolated.size()) + " isolated vertices (first: '" +
       vocab.token(isolated.front()) + "')");
  return Graph(Vocabulary(std::move(kept_tokens)), assemble(m, m, triplets));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

Graph load_edge_list(std::istream& in, IsolatedPolicy policy) {
  Vocabulary vocab;
  std::vector<Triplet> triplets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = fields_of(line);
    if (f.empty()) continue;
    if (f.size() < 2 || f.size() > 3)
      throw FormatError("expected 'src dst [weight]', got " + std::to_string(f.size()) +
                            " fields",
                        line_no);
    const Index u = vocab.intern(f[0]);
    const Index v = vocab.intern(f[1]);
    const double w = f.size() == 3 ? parse_weight(f[2], line_no) : 1.0;
    triplets.emplace_back(u, v, w);
    if (u != v) triplets.emplace_back(v, u, w);
  }
  if (in.bad()) throw IoError("read error in edge list");
  if (vocab.size() == 0) throw ValidationError("edge list contains no edges");
  const Index n = vocab.size();
  return finish_graph(std::move(vocab), assemble(n, n, triplets), policy);
}

Graph load_edge_list_file(const std::string& path, IsolatedPolicy policy) {
  auto in = open_input(path);
  try {
    return load_edge_list(in, policy);
  } catch (const FormatError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Graph graph_from_edges(Index n, const std::vector<Edge>& edges, IsolatedPolicy policy) {
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) tokens.push_back(std::to_string(i));
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw ValidationError("edge endpoint out of range");
    if (!(e.weight >= 0.0)) throw ValidationError("negative edge weight");
    triplets.emplace_back(e.u, e.v, e.weight);
    if (e.u != e.v) triplets.emplace_back(e.v, e.u, e.weight);
  }
  return finish_graph(Vocabulary(std::move(tokens)), assemble(n, n, triplets), policy);
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  const Index n = graph.num_vertices();
  const auto& adj = graph.adjacency();
  const auto& vocab = graph.vocabulary();
  std::set<std::pair<Index, Index>> written;
  char buf[64];
  auto emit = [&](Index a, Index b) {
    std::snprintf(buf, sizeof buf, "%.17g", graph.weight(a, b));
    out << vocab.token(a) << ' ' << vocab.token(b) << ' ' << buf << '\n';
    written.emplace(std::min(a, b), std::max(a, b));
  };

  // Introduce vertices in index order first so a reload assigns the same ids.
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k) {
    if (seen[k]) continue;
    Index earlier = -1;
    for (SparseMatrix::InnerIterator it(adj, k); it; ++it) {
      if (it.col() < k) {
        earlier = it.col();
        break;
      }
    }
    if (earlier >= 0) {
      emit(earlier, k);
    } else if (k + 1 < n && !seen[k + 1] && graph.weight(k, k + 1) > 0.0) {
      emit(k, k + 1);
      seen[k + 1] = true;
    } else if (graph.weight(k, k) > 0.0) {
      emit(k, k);
    } else {
      // Index order is not reproducible from any edge order; write anyway.
      SparseMatrix::InnerIterator it(adj, k);
      emit(k, it.col());
      seen[it.col()] = true;
    }
    seen[k] = true;
  }
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it)
      if (it.col() >= i && written.count({i, it.col()}) == 0) emit(i, it.col());
}

void write_vocabulary(const Vocabulary& vocabulary, std::ostream& out) {
  for (Index i = 0; i < vocabulary.size(); ++i) out << i << '\t' << vocabulary.token(i) << '\n';
}

BipartiteGraph load_bipartite_edge_list(std::istream& in, const Vocabulary* cols) {
  Vocabulary rows;
  Vocabulary own_cols;
  std::vector<Triplet> triplets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = fields_of(line);
    if (f.empty()) continue;
    if (f.size() < 2 || f.size() > 3)
      throw FormatError("expected 'row col [weight]'", line_no);
    const Index r = rows.intern(f[0]);
    Index c = 0;
    if (cols != nullptr) {
      auto found = cols->find(f[1]);
      if (!found)
        throw FormatError("column token '" + std::string(f[1]) + "' is not in the vocabulary",
                          line_no);
      c = *found;
    } else {
      c = own_cols.intern(f[1]);
    }
    triplets.emplace_back(r, c, f.size() == 3 ? parse_weight(f[2], line_no) : 1.0);
  }
  Vocabulary col_vocab = cols != nullptr ? *cols : std::move(own_cols);
  SparseMatrix adj = assemble(rows.size(), col_vocab.size(), triplets);
  return BipartiteGraph(std::move(rows), std::move(col_vocab), std::move(adj));
}

LabelSet load_labels(std::istream& in, const Vocabulary& vertices) {
  LabelSet set;
  set.num_vertices = vertices.size();
  set.assignments.resize(static_cast<std::size_t>(vertices.size()));
  std::size_t unknown = 0;
  std::string first_unknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = fields_of(line);
    if (f.empty()) continue;
    if (f.size() != 2) throw FormatError("expected 'vertex label'", line_no);
    auto v = vertices.find(f[0]);
    if (!v) {
      if (unknown++ == 0) first_unknown = std::string(f[0]);
      continue;
    }
    const Index label = set.labels.intern(f[1]);
    auto& mine = set.assignments[static_cast<std::size_t>(*v)];
    if (std::find(mine.begin(), mine.end(), label) == mine.end()) mine.push_back(label);
  }
  for (auto& a : set.assignments) std::sort(a.begin(), a.end());
  if (unknown > 0)
    warn("skipped " + std::to_string(unknown) + " label lines for unknown vertices (first: '" +
         first_unknown + "')");
  return set;
}

LabelSet load_labels_file(const std::string& path, const Vocabulary& vertices) {
  auto in = open_input(path);
  return load_labels(in, vertices);
}

// ------------------------------------------------------------ derived forms

Graph largest_connected_component(const Graph& graph) {
  Index count = 0;
  const auto comp = component_ids(graph.adjacency(), &count);
  if (count <= 1) return graph;
  std::vector<Index> sizes(static_cast<std::size_t>(count), 0);
  for (Index c : comp) ++sizes[c];
  // Component ids follow their smallest vertex, so the first maximum wins ties.
  const Index best = static_cast<Index>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  const Index n = graph.num_vertices();
  std::vector<Index> remap(static_cast<std::size_t>(n), -1);
  std::vector<std::string> tokens;
  for (Index i = 0; i < n; ++i) {
    if (comp[i] != best) continue;
    remap[i] = static_cast<Index>(tokens.size());
    tokens.push_back(graph.vocabulary().token(i));
  }
  std::vector<Triplet> triplets;
  for (Index i = 0; i < n; ++i) {
    if (remap[i] < 0) continue;
    for (SparseMatrix::InnerIterator it(graph.adjacency(), i); it; ++it)
      triplets.emplace_back(remap[i], remap[it.col()], it.value());
  }
  const Index m = static_cast<Index>(tokens.size());
  return Graph(Vocabulary(std::move(tokens)), assemble(m, m, triplets));
}

SparseMatrix transition_matrix(const Graph& graph) {
  SparseMatrix p = graph.adjacency();
  for (Index i = 0; i < p.outerSize(); ++i) {
    const double d = graph.degree(i);
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) it.valueRef() /= d;
  }
  return p;
}

SparseMatrix normalized_adjacency(const Graph& graph) {
  SparseMatrix s = graph.adjacency();
  const auto& d = graph.degrees();
  for (Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it)
      it.valueRef() /= std::sqrt(d[i] * d[it.col()]);
  return s;
}

}  // namespace netmf
