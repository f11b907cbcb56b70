#include "netmf/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "netmf/errors.hpp"
#include "netmf/parallel.hpp"

namespace netmf {

const char* to_string(MatrixKind kind) noexcept {
  switch (kind) {
    case MatrixKind::kSimilarity: return "similarity";
    case MatrixKind::kShifted: return "shifted";
    case MatrixKind::kLogShifted: return "log-shifted";
  }
  return "unknown";
}

Provenance& Provenance::set(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return set(key, std::string(buf));
}

Provenance& Provenance::set(const std::string& key, std::string value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  params.emplace_back(key, std::move(value));
  return *this;
}

std::string Provenance::describe() const {
  std::string out = "model=" + model;
  for (const auto& [k, v] : params) out += " " + k + "=" + v;
  return out;
}

namespace {

void check_negative(double b) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw ParameterError("negative-sample count b must be positive");
}

void check_window(int window) {
  if (window < 1) throw ParameterError("window size T must be at least 1");
}

void check_dense(Index rows, Index cols, const DenseLimits& limits) {
  if (rows > limits.max_vertices || cols > limits.max_vertices)
    throw CapacityError("dense " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " matrix exceeds the limit of " + std::to_string(limits.max_vertices) +
                        "; use the spectral approximation (embed --mode approx --rank h)");
}

// out = S * in, one column per task. Each column's summation order is fixed
// by the CSR layout of S, so the result does not depend on the worker count.
void sparse_times_dense(const SparseMatrix& s, const DenseMatrix& in, DenseMatrix& out) {
  out.resize(s.rows(), in.cols());
  parallel_for(static_cast<std::size_t>(in.cols()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      for (Index i = 0; i < s.outerSize(); ++i) {
        double acc = 0.0;
        for (SparseMatrix::InnerIterator it(s, i); it; ++it) acc += it.value() * in(it.col(), col);
        out(i, col) = acc;
      }
    }
  });
}

// Calls visit(r, P^r) for r = 1..T.
void for_each_power(const Graph& graph, int window,
                    const std::function<void(int, const DenseMatrix&)>& visit) {
  const SparseMatrix p = transition_matrix(graph);
  DenseMatrix power = DenseMatrix(p);
  DenseMatrix next;
  visit(1, power);
  for (int r = 2; r <= window; ++r) {
    sparse_times_dense(p, power, next);
    power.swap(next);
    visit(r, power);
  }
}

}  // namespace

ClosedFormMatrix line_matrix(const Graph& graph, double negative, const DenseLimits& limits) {
  check_negative(negative);
  const Index n = graph.num_vertices();
  check_dense(n, n, limits);
  ClosedFormMatrix out;
  out.values = DenseMatrix::Zero(n, n);
  const auto& d = graph.degrees();
  const double scale = graph.volume() / negative;
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(graph.adjacency(), i); it; ++it)
      out.values(i, it.col()) = scale * it.value() / (d[i] * d[it.col()]);
  out.kind = MatrixKind::kSimilarity;
  out.provenance.model = "line";
  out.provenance.set("T", 1.0).set("b", negative).set("n", static_cast<double>(n));
  return out;
}

std::vector<DenseMatrix> transition_powers(const Graph& graph, int window,
                                           const DenseLimits& limits) {
  check_window(window);
  check_dense(graph.num_vertices(), graph.num_vertices(), limits);
  std::vector<DenseMatrix> out;
  out.reserve(static_cast<std::size_t>(window));
  for_each_power(graph, window, [&](int, const DenseMatrix& pr) { out.push_back(pr); });
  return out;
}

ClosedFormMatrix deepwalk_matrix(const Graph& graph, int window, double negative,
                                 const DenseLimits& limits) {
  check_window(window);
  check_negative(negative);
  const Index n = graph.num_vertices();
  check_dense(n, n, limits);

  DenseMatrix sum = DenseMatrix::Zero(n, n);
  for_each_power(graph, window, [&](int, const DenseMatrix& pr) { sum += pr; });

  const double scale = graph.volume() / (negative * window);
  const auto& d = graph.degrees();
  for (Index j = 0; j < n; ++j) sum.col(j) *= scale / d[j];

  ClosedFormMatrix out;
  out.values = std::move(sum);
  out.kind = MatrixKind::kSimilarity;
  out.provenance.model = "deepwalk";
  out.provenance.set("T", static_cast<double>(window))
      .set("b", negative)
      .set("n", static_cast<double>(n));
  return out;
}

PteWeights PteWeights::balanced(const Graph& ww, const BipartiteGraph& dw,
                                const BipartiteGraph& lw) {
  if (!(dw.volume() > 0.0) || !(lw.volume() > 0.0))
    throw ValidationError("PTE sub-networks must have positive volume");
  return PteWeights{1.0, ww.volume() / dw.volume(), ww.volume() / lw.volume()};
}

ClosedFormMatrix pte_matrix(const Graph& ww, const BipartiteGraph& dw, const BipartiteGraph& lw,
                            std::optional<PteWeights> weights, double negative,
                            const DenseLimits& limits) {
  check_negative(negative);
  const Index words = ww.num_vertices();
  if (dw.num_cols() != words || lw.num_cols() != words)
    throw ValidationError("PTE column counts disagree: word-word has " + std::to_string(words) +
                          " words, doc-word " + std::to_string(dw.num_cols()) +
                          ", label-word " + std::to_string(lw.num_cols()));
  const PteWeights w = weights ? *weights : PteWeights::balanced(ww, dw, lw);
  if (w.alpha < 0.0 || w.beta < 0.0 || w.gamma < 0.0)
    throw ParameterError("PTE weights must be nonnegative");
  const Index rows = words + dw.num_rows() + lw.num_rows();
  check_dense(rows, words, limits);

  ClosedFormMatrix out;
  out.values = DenseMatrix::Zero(rows, words);

  // Zero-degree columns only meet zero entries, which stay zero.
  auto fill = [&](Index row_offset, const SparseMatrix& a, const Vector& row_deg,
                  const Vector& col_deg, double vol, double weight) {
    const double scale = weight * vol / negative;
    for (Index i = 0; i < a.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(a, i); it; ++it)
        out.values(row_offset + i, it.col()) = scale * it.value() / (row_deg[i] * col_deg[it.col()]);
  };
  fill(0, ww.adjacency(), ww.degrees(), ww.degrees(), ww.volume(), w.alpha);
  fill(words, dw.adjacency(), dw.row_degrees(), dw.col_degrees(), dw.volume(), w.beta);
  fill(words + dw.num_rows(), lw.adjacency(), lw.row_degrees(), lw.col_degrees(), lw.volume(),
       w.gamma);

  out.kind = MatrixKind::kSimilarity;
  out.provenance.model = "pte";
  out.provenance.set("alpha", w.alpha)
      .set("beta", w.beta)
      .set("gamma", w.gamma)
      .set("b", negative)
      .set("weights", weights ? "explicit" : "balanced")
      .set("n", static_cast<double>(words));
  return out;
}

// ------------------------------------------------------------ node2vec chain

SecondOrderChain::SecondOrderChain(const Graph& graph, double p, double q,
                                   const DenseLimits& limits)
    : p_(p), q_(q), num_vertices_(graph.num_vertices()) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
    throw ParameterError("node2vec parameters p and q must be positive and finite");
  const auto& adj = graph.adjacency();
  if (static_cast<std::size_t>(adj.nonZeros()) > limits.max_edge_states)
    throw CapacityError("node2vec edge-state chain needs " + std::to_string(adj.nonZeros()) +
                        " states, above the limit of " +
                        std::to_string(limits.max_edge_states));

  // CSR order gives states grouped by current vertex, previous ascending.
  offsets_.assign(static_cast<std::size_t>(num_vertices_) + 1, 0);
  states_.reserve(static_cast<std::size_t>(adj.nonZeros()));
  std::vector<double> weights;
  weights.reserve(states_.capacity());
  for (Index v = 0; v < num_vertices_; ++v) {
    offsets_[v] = static_cast<Index>(states_.size());
    for (SparseMatrix::InnerIterator it(adj, v); it; ++it) {
      states_.push_back({v, static_cast<Index>(it.col())});
      weights.push_back(it.value());
    }
  }
  offsets_[num_vertices_] = static_cast<Index>(states_.size());
  edge_weights_ = Eigen::Map<const Vector>(weights.data(), static_cast<Index>(weights.size()));

  const double inv_p = 1.0 / p;
  const double inv_q = 1.0 / q;
  std::vector<Eigen::Triplet<double, Index>> triplets;
  for (Index s = 0; s < num_states(); ++s) {
    const auto [v, w] = states_[s];
    double total = 0.0;
    const std::size_t first = triplets.size();
    for (SparseMatrix::InnerIterator it(adj, v); it; ++it) {
      const Index u = it.col();
      double bias = inv_q;
      if (u == w) {
        bias = inv_p;
      } else if (graph.weight(w, u) > 0.0) {
        bias = 1.0;
      }
      const double weight = bias * it.value();
      // Next state is (u, v); it exists because A_{u,v} = A_{v,u} > 0.
      const auto next = find_state(u, v);
      if (!next) throw InternalError("missing reverse edge state");
      triplets.emplace_back(s, *next, weight);
      total += weight;
    }
    if (!(total > 0.0))
      throw InternalError("edge state (" + std::to_string(v) + ", " + std::to_string(w) +
                          ") has no outgoing mass");
    for (std::size_t t = first; t < triplets.size(); ++t)
      triplets[t] = {triplets[t].row(), triplets[t].col(), triplets[t].value() / total};
  }
  step_.resize(num_states(), num_states());
  step_.setFromTriplets(triplets.begin(), triplets.end());
  step_.makeCompressed();
}

std::optional<Index> SecondOrderChain::find_state(Index current, Index previous) const {
  if (current < 0 || current >= num_vertices_) return std::nullopt;
  auto begin = states_.begin() + offsets_[current];
  auto end = states_.begin() + offsets_[current + 1];
  auto it = std::lower_bound(begin, end, previous,
                             [](const State& s, Index prev) { return s.previous < prev; });
  if (it == end || it->previous != previous) return std::nullopt;
  return static_cast<Index>(it - states_.begin());
}

Vector EdgeDistribution::vertex_marginal(const SecondOrderChain& chain) const {
  Vector m = Vector::Zero(chain.num_vertices());
  for (Index s = 0; s < chain.num_states(); ++s) m[chain.state(s).current] += probabilities[s];
  return m;
}

EdgeDistribution stationary_distribution(const SecondOrderChain& chain, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ParameterError("stationary tolerance must be positive");
  const Index m = chain.num_states();
  const SparseMatrix& step = chain.step();

  EdgeDistribution out;
  out.probabilities = chain.edge_weights() / chain.edge_weights().sum();
  Vector next(m);
  const SparseMatrix step_t = step.transpose();
  for (int it = 0; it <= max_iter; ++it) {
    next = step_t * out.probabilities;
    out.residual = (next - out.probabilities).lpNorm<1>();
    out.iterations = it;
    if (out.residual <= tol) return out;
    out.probabilities = next / next.sum();
  }
  throw ConvergenceError("edge-state stationary distribution did not converge: residual " +
                             std::to_string(out.residual) + " after " +
                             std::to_string(max_iter) + " iterations (periodic chain?)",
                         {out.residual});
}

std::vector<DenseMatrix> node2vec_offset_joints(const SecondOrderChain& chain,
                                                const EdgeDistribution& x, int window) {
  check_window(window);
  const Index n = chain.num_vertices();
  const Index m = chain.num_states();
  std::vector<DenseMatrix> f(static_cast<std::size_t>(window), DenseMatrix::Zero(n, n));
  const SparseMatrix step_t = chain.step().transpose();

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    Vector mass(m);
    Vector next(m);
    for (std::size_t wi = begin; wi < end; ++wi) {
      const auto w = static_cast<Index>(wi);
      mass.setZero();
      for (Index s = chain.first_state(w); s < chain.first_state(w + 1); ++s)
        mass[s] = x.probabilities[s];
      for (int r = 1; r <= window; ++r) {
        next.noalias() = step_t * mass;
        mass.swap(next);
        auto& fr = f[static_cast<std::size_t>(r - 1)];
        for (Index c = 0; c < n; ++c) {
          double acc = 0.0;
          for (Index s = chain.first_state(c); s < chain.first_state(c + 1); ++s) acc += mass[s];
          fr(w, c) = acc;
        }
      }
    }
  });
  return f;
}

DenseMatrix node2vec_joint(const SecondOrderChain& chain, const EdgeDistribution& x, int window) {
  const auto f = node2vec_offset_joints(chain, x, window);
  const Index n = chain.num_vertices();
  DenseMatrix joint = DenseMatrix::Zero(n, n);
  for (const auto& fr : f) joint += fr + fr.transpose();
  joint /= 2.0 * window;
  return joint;
}

ClosedFormMatrix node2vec_matrix(const Graph& graph, double p, double q, int window,
                                 double negative, const Node2vecOptions& options) {
  check_window(window);
  check_negative(negative);
  const Index n = graph.num_vertices();
  check_dense(n, n, options.limits);
  const SecondOrderChain chain(graph, p, q, options.limits);
  const EdgeDistribution x =
      stationary_distribution(chain, options.stationary_tol, options.stationary_max_iter);
  DenseMatrix joint = node2vec_joint(chain, x, window);
  const Vector marginal = x.vertex_marginal(chain);
  for (Index w = 0; w < n; ++w) {
    for (Index c = 0; c < n; ++c) {
      const double denom = negative * marginal[w] * marginal[c];
      joint(w, c) = denom > 0.0 ? joint(w, c) / denom : 0.0;
    }
  }
  ClosedFormMatrix out;
  out.values = std::move(joint);
  out.kind = MatrixKind::kSimilarity;
  out.provenance.model = "node2vec";
  out.provenance.set("T", static_cast<double>(window))
      .set("b", negative)
      .set("p", p)
      .set("q", q)
      .set("n", static_cast<double>(n));
  return out;
}

}  // namespace netmf
