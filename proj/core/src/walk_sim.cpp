#include "netmf/walk_sim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>

#include "netmf/errors.hpp"
#include "netmf/parallel.hpp"

namespace netmf {

namespace {

// Dense counting below this many cells per buffer, hashed above.
constexpr std::uint64_t kDenseCellCap = std::uint64_t{1} << 20;

class CountBuffer {
 public:
  explicit CountBuffer(std::uint64_t extent) : extent_(extent) {
    if (extent_ <= kDenseCellCap) dense_.assign(extent_, 0);
  }

  void add(std::uint64_t key) {
    if (!dense_.empty()) {
      ++dense_[key];
    } else {
      ++sparse_[key];
    }
  }

  void merge_from(const CountBuffer& other) {
    if (!dense_.empty()) {
      for (std::uint64_t k = 0; k < extent_; ++k) dense_[k] += other.dense_[k];
    } else {
      for (const auto& [k, c] : other.sparse_) sparse_[k] += c;
    }
  }

  // Nonzero (key, count) pairs in increasing key order.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted() const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    if (!dense_.empty()) {
      for (std::uint64_t k = 0; k < extent_; ++k)
        if (dense_[k] != 0) out.emplace_back(k, dense_[k]);
    } else {
      out.assign(sparse_.begin(), sparse_.end());
      std::sort(out.begin(), out.end());
    }
    return out;
  }

 private:
  std::uint64_t extent_;
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
};

// Per-offset pair counts, key = (r - 1) n^2 + w n + c.
struct OffsetBuffers {
  CountBuffer forward;
  CountBuffer backward;

  OffsetBuffers(Index n, int window)
      : forward(extent(n, window)), backward(extent(n, window)) {}

  static std::uint64_t extent(Index n, int window) {
    return static_cast<std::uint64_t>(window) * static_cast<std::uint64_t>(n) *
           static_cast<std::uint64_t>(n);
  }
};

// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index k in [begin, end) with cum[k-1] <= x < cum[k], cum being a running sum.
Index draw(const std::vector<double>& cum, Index begin, Index end, double x) {
  auto it = std::upper_bound(cum.begin() + begin, cum.begin() + end, x);
  if (it == cum.begin() + end) --it;
  return static_cast<Index>(it - cum.begin());
}

// Per-row running sums over CSR values.
std::vector<double> row_cumulative(const SparseMatrix& m) {
  std::vector<double> cum(static_cast<std::size_t>(m.nonZeros()));
  const Index* outer = m.outerIndexPtr();
  const double* values = m.valuePtr();
  for (Index r = 0; r < m.outerSize(); ++r) {
    double acc = 0.0;
    for (Index k = outer[r]; k < outer[r + 1]; ++k) {
      acc += values[k];
      cum[k] = acc;
    }
  }
  return cum;
}

std::mt19937_64 walk_rng(std::uint64_t seed, std::uint64_t walk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(walk), static_cast<std::uint32_t>(walk >> 32)};
  return std::mt19937_64(seq);
}

void check_params(const WalkParams& params) {
  if (params.window < 1) throw ParameterError("window size T must be at least 1");
  if (params.walks < 1) throw ParameterError("number of walks N must be at least 1");
  if (params.length <= params.window)
    throw ParameterError("walk length L (" + std::to_string(params.length) +
                         ") must exceed the window size T (" + std::to_string(params.window) +
                         ")");
}

void warn_assumptions(const Graph& graph) {
  if (!graph.is_connected())
    warn("graph is disconnected; walk statistics depend on the start distribution");
  if (graph.is_bipartite())
    warn("graph is bipartite; the random walk is periodic and may not converge");
}

void fill_counts(CorpusCounts& out, Index n, int window, const OffsetBuffers& buffers) {
  out.num_vertices = n;
  out.window = window;
  const std::uint64_t nn = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  auto split = [&](const CountBuffer& buffer, std::vector<PairCounts>& dest) {
    std::vector<std::vector<PairCounts::Entry>> parts(static_cast<std::size_t>(window));
    for (const auto& [key, count] : buffer.sorted())
      parts[static_cast<std::size_t>(key / nn)].push_back({key % nn, count});
    dest.clear();
    for (auto& part : parts) dest.emplace_back(n, std::move(part));
  };
  split(buffers.forward, out.forward);
  split(buffers.backward, out.backward);

  std::vector<std::uint64_t> pair_dense;
  const bool dense = nn <= kDenseCellCap;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_sparse;
  if (dense) pair_dense.assign(nn, 0);
  auto accumulate = [&](const std::vector<PairCounts>& per_offset) {
    for (const auto& pc : per_offset)
      for (const auto& e : pc.entries()) {
        if (dense) {
          pair_dense[e.key] += e.count;
        } else {
          pair_sparse[e.key] += e.count;
        }
      }
  };
  accumulate(out.forward);
  accumulate(out.backward);
  std::vector<PairCounts::Entry> entries;
  if (dense) {
    for (std::uint64_t k = 0; k < nn; ++k)
      if (pair_dense[k] != 0) entries.push_back({k, pair_dense[k]});
  } else {
    for (const auto& [k, c] : pair_sparse) entries.push_back({k, c});
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.key < b.key; });
  }
  out.pairs = PairCounts(n, std::move(entries));
  out.total = out.pairs.total();
  out.word_counts.assign(static_cast<std::size_t>(n), 0);
  out.context_counts.assign(static_cast<std::size_t>(n), 0);
  for (const auto& e : out.pairs.entries()) {
    out.word_counts[e.key / static_cast<std::uint64_t>(n)] += e.count;
    out.context_counts[e.key % static_cast<std::uint64_t>(n)] += e.count;
  }
}

double l1(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().sum(); }

}  // namespace

// ---------------------------------------------------------------- PairCounts

PairCounts::PairCounts(Index n, std::vector<Entry> entries) : n_(n), entries_(std::move(entries)) {
  for (const auto& e : entries_) total_ += e.count;
}

std::uint64_t PairCounts::at(Index row, Index col) const {
  const std::uint64_t key =
      static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(col);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const Entry& e, std::uint64_t k) { return e.key < k; });
  return it != entries_.end() && it->key == key ? it->count : 0;
}

DenseMatrix PairCounts::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(n_, n_);
  const auto n = static_cast<std::uint64_t>(n_);
  for (const auto& e : entries_)
    out(static_cast<Index>(e.key / n), static_cast<Index>(e.key % n)) = static_cast<double>(e.count);
  return out;
}

PairCounts PairCounts::transposed() const {
  const auto n = static_cast<std::uint64_t>(n_);
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({(e.key % n) * n + e.key / n, e.count});
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  return PairCounts(n_, std::move(out));
}

bool operator==(const PairCounts::Entry& a, const PairCounts::Entry& b) {
  return a.key == b.key && a.count == b.count;
}

bool operator==(const PairCounts& a, const PairCounts& b) {
  return a.n_ == b.n_ && a.entries_ == b.entries_;
}

const char* to_string(StartDistribution start) noexcept {
  switch (start) {
    case StartDistribution::kStationary: return "stationary";
    case StartDistribution::kUniform: return "uniform";
  }
  return "unknown";
}

std::uint64_t TripletCorpus::triplet(Index w, Index c, Index u) const {
  const auto n = static_cast<std::uint64_t>(num_vertices);
  const std::uint64_t key = (static_cast<std::uint64_t>(w) * n + static_cast<std::uint64_t>(c)) * n +
                            static_cast<std::uint64_t>(u);
  auto it = std::lower_bound(triplets.begin(), triplets.end(), key,
                             [](const auto& e, std::uint64_t k) { return e.first < k; });
  return it != triplets.end() && it->first == key ? it->second : 0;
}

// ---------------------------------------------------------------- corpora

WalkCorpus deepwalk_corpus(const Graph& graph, const WalkParams& params, StartDistribution start) {
  check_params(params);
  warn_assumptions(graph);
  const Index n = graph.num_vertices();
  const int window = params.window;
  const Index length = params.length;
  const SparseMatrix& adj = graph.adjacency();
  const std::vector<double> cum = row_cumulative(adj);
  const Index* outer = adj.outerIndexPtr();
  const Index* inner = adj.innerIndexPtr();
  std::vector<double> start_cum(static_cast<std::size_t>(n));
  {
    double acc = 0.0;
    for (Index v = 0; v < n; ++v) start_cum[v] = acc += graph.degree(v);
  }
  const auto nu = static_cast<std::uint64_t>(n);
  const auto nn = nu * nu;

  OffsetBuffers total(n, window);
  std::mutex mutex;
  parallel_for(static_cast<std::size_t>(params.walks), [&](std::size_t begin, std::size_t end) {
    OffsetBuffers local(n, window);
    std::vector<Index> walk(static_cast<std::size_t>(length));
    for (std::size_t wi = begin; wi < end; ++wi) {
      std::mt19937_64 rng = walk_rng(params.seed, wi);
      Index v = 0;
      if (start == StartDistribution::kStationary) {
        v = draw(start_cum, 0, n, unit(rng) * start_cum.back());
      } else {
        v = std::min<Index>(n - 1, static_cast<Index>(unit(rng) * n));
      }
      walk[0] = v;
      for (Index j = 1; j < length; ++j) {
        const Index row_begin = outer[v];
        const Index row_end = outer[v + 1];
        const Index k = draw(cum, row_begin, row_end, unit(rng) * cum[row_end - 1]);
        v = inner[k];
        walk[j] = v;
      }
      for (Index j = 0; j < length - window; ++j) {
        const auto w = static_cast<std::uint64_t>(walk[j]);
        for (int r = 1; r <= window; ++r) {
          const auto c = static_cast<std::uint64_t>(walk[j + r]);
          const std::uint64_t base = static_cast<std::uint64_t>(r - 1) * nn;
          local.forward.add(base + w * nu + c);
          local.backward.add(base + c * nu + w);
        }
      }
    }
    std::lock_guard<std::mutex> lock(mutex);
    total.forward.merge_from(local.forward);
    total.backward.merge_from(local.backward);
  });

  WalkCorpus out;
  out.params = params;
  out.start = start;
  fill_counts(out, n, window, total);
  return out;
}

TripletCorpus node2vec_corpus(const Graph& graph, double p, double q, const WalkParams& params,
                              const Node2vecOptions& options) {
  check_params(params);
  warn_assumptions(graph);
  const Index n = graph.num_vertices();
  const int window = params.window;
  const Index length = params.length;
  const SecondOrderChain chain(graph, p, q, options.limits);
  const EdgeDistribution x =
      stationary_distribution(chain, options.stationary_tol, options.stationary_max_iter);
  const SparseMatrix& step = chain.step();
  const std::vector<double> cum = row_cumulative(step);
  const Index* outer = step.outerIndexPtr();
  const Index* inner = step.innerIndexPtr();
  std::vector<double> start_cum(static_cast<std::size_t>(chain.num_states()));
  {
    double acc = 0.0;
    for (Index s = 0; s < chain.num_states(); ++s) start_cum[s] = acc += x.probabilities[s];
  }
  const auto nu = static_cast<std::uint64_t>(n);
  const auto nn = nu * nu;

  OffsetBuffers total(n, window);
  CountBuffer total_triplets(nn * nu);
  std::mutex mutex;
  parallel_for(static_cast<std::size_t>(params.walks), [&](std::size_t begin, std::size_t end) {
    OffsetBuffers local(n, window);
    CountBuffer local_triplets(nn * nu);
    std::vector<Index> walk(static_cast<std::size_t>(length));
    for (std::size_t wi = begin; wi < end; ++wi) {
      std::mt19937_64 rng = walk_rng(params.seed, wi);
      Index s = draw(start_cum, 0, chain.num_states(), unit(rng) * start_cum.back());
      walk[0] = chain.state(s).previous;
      walk[1] = chain.state(s).current;
      for (Index j = 2; j < length; ++j) {
        const Index row_begin = outer[s];
        const Index row_end = outer[s + 1];
        s = inner[draw(cum, row_begin, row_end, unit(rng) * cum[row_end - 1])];
        walk[j] = chain.state(s).current;
      }
      for (Index j = 1; j < length - window; ++j) {
        const auto w = static_cast<std::uint64_t>(walk[j]);
        const auto u = static_cast<std::uint64_t>(walk[j - 1]);
        for (int r = 1; r <= window; ++r) {
          const auto c = static_cast<std::uint64_t>(walk[j + r]);
          const std::uint64_t base = static_cast<std::uint64_t>(r - 1) * nn;
          local.forward.add(base + w * nu + c);
          local.backward.add(base + c * nu + w);
          local_triplets.add((w * nu + c) * nu + u);
          local_triplets.add((c * nu + w) * nu + u);
        }
      }
    }
    std::lock_guard<std::mutex> lock(mutex);
    total.forward.merge_from(local.forward);
    total.backward.merge_from(local.backward);
    total_triplets.merge_from(local_triplets);
  });

  TripletCorpus out;
  out.params = params;
  out.p = p;
  out.q = q;
  fill_counts(out, n, window, total);
  out.triplets = total_triplets.sorted();
  return out;
}

ClosedFormMatrix empirical_sgns_matrix(const CorpusCounts& corpus, double negative) {
  if (!(negative > 0.0)) throw ParameterError("negative-sample count b must be positive");
  if (corpus.total == 0) throw ParameterError("corpus is empty");
  const Index n = corpus.num_vertices;
  const auto nu = static_cast<std::uint64_t>(n);
  ClosedFormMatrix out;
  out.values = DenseMatrix::Zero(n, n);
  const double total = static_cast<double>(corpus.total);
  for (const auto& e : corpus.pairs.entries()) {
    const auto w = static_cast<Index>(e.key / nu);
    const auto c = static_cast<Index>(e.key % nu);
    const double ratio = static_cast<double>(e.count) * total /
                         (negative * static_cast<double>(corpus.word_counts[w]) *
                          static_cast<double>(corpus.context_counts[c]));
    out.values(w, c) = std::log(std::max(ratio, 1.0));
  }
  out.kind = MatrixKind::kLogShifted;
  out.provenance.model = "sgns-empirical";
  out.provenance.set("T", static_cast<double>(corpus.window))
      .set("b", negative)
      .set("n", static_cast<double>(n));
  return out;
}

// ---------------------------------------------------------------- theory

namespace {

void finish_theory(WalkTheory& t) {
  const Index n = static_cast<Index>(t.offset_joints.front().rows());
  t.joint = DenseMatrix::Zero(n, n);
  for (const auto& f : t.offset_joints) t.joint += f + f.transpose();
  t.joint /= 2.0 * t.window;
  t.marginal = t.joint.rowwise().sum();
  t.similarity = DenseMatrix::Zero(n, n);
  for (Index w = 0; w < n; ++w)
    for (Index c = 0; c < n; ++c) {
      const double denom = t.negative * t.marginal[w] * t.marginal[c];
      if (denom > 0.0) t.similarity(w, c) = t.joint(w, c) / denom;
    }
}

}  // namespace

WalkTheory deepwalk_theory(const Graph& graph, int window, double negative) {
  if (!(negative > 0.0)) throw ParameterError("negative-sample count b must be positive");
  WalkTheory t;
  t.window = window;
  t.negative = negative;
  const Vector stationary = graph.degrees() / graph.volume();
  for (auto& power : transition_powers(graph, window))
    t.offset_joints.push_back(stationary.asDiagonal() * power);
  finish_theory(t);
  return t;
}

WalkTheory node2vec_theory(const Graph& graph, double p, double q, int window, double negative,
                           const Node2vecOptions& options) {
  if (!(negative > 0.0)) throw ParameterError("negative-sample count b must be positive");
  const SecondOrderChain chain(graph, p, q, options.limits);
  const EdgeDistribution x =
      stationary_distribution(chain, options.stationary_tol, options.stationary_max_iter);
  WalkTheory t;
  t.window = window;
  t.negative = negative;
  t.offset_joints = node2vec_offset_joints(chain, x, window);
  finish_theory(t);
  return t;
}

DenseMatrix empirical_joint(const CorpusCounts& corpus) {
  if (corpus.total == 0) throw ParameterError("corpus is empty");
  return corpus.pairs.to_dense() / static_cast<double>(corpus.total);
}

ConvergenceReport convergence_report(const CorpusCounts& corpus, const WalkTheory& theory) {
  const Index n = corpus.num_vertices;
  if (theory.joint.rows() != n || theory.window != corpus.window)
    throw ParameterError("corpus (n=" + std::to_string(n) + ", T=" +
                         std::to_string(corpus.window) + ") does not match theory (n=" +
                         std::to_string(theory.joint.rows()) + ", T=" +
                         std::to_string(theory.window) + ")");
  ConvergenceReport r;
  const DenseMatrix joint = empirical_joint(corpus);
  r.joint_l1 = l1(joint, theory.joint);
  r.joint_max = (joint - theory.joint).cwiseAbs().maxCoeff();
  for (int k = 0; k < corpus.window; ++k) {
    const auto& fwd = corpus.forward[static_cast<std::size_t>(k)];
    const auto& bwd = corpus.backward[static_cast<std::size_t>(k)];
    const DenseMatrix& f = theory.offset_joints[static_cast<std::size_t>(k)];
    r.forward_l1.push_back(
        fwd.total() ? l1(fwd.to_dense() / static_cast<double>(fwd.total()), f) : f.sum());
    r.backward_l1.push_back(bwd.total() ? l1(bwd.to_dense() / static_cast<double>(bwd.total()),
                                             f.transpose())
                                        : f.sum());
  }
  Vector marginal(n);
  for (Index w = 0; w < n; ++w)
    marginal[w] = static_cast<double>(corpus.word_counts[static_cast<std::size_t>(w)]) /
                  static_cast<double>(corpus.total);
  r.marginal_l1 = (marginal - theory.marginal).lpNorm<1>();

  const DenseMatrix empirical = empirical_sgns_matrix(corpus, theory.negative).values;
  for (Index w = 0; w < n; ++w)
    for (Index c = 0; c < n; ++c) {
      if (!(theory.similarity(w, c) > 0.0) || corpus.pairs.at(w, c) == 0) continue;
      const double expected = std::log(std::max(theory.similarity(w, c), 1.0));
      r.pmi_max = std::max(r.pmi_max, std::abs(empirical(w, c) - expected));
      ++r.pmi_entries;
    }
  return r;
}

}  // namespace netmf
