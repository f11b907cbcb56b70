#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netmf/closed_form.hpp"
#include "netmf/errors.hpp"
#include "netmf/factorize.hpp"
#include "netmf/generators.hpp"
#include "netmf/parallel.hpp"
#include "netmf/spectral.hpp"
#include "oracles.hpp"

namespace netmf {
namespace {

using testing::frozen;

double max_abs(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

ClosedFormMatrix similarity(DenseMatrix values) {
  ClosedFormMatrix m;
  m.values = std::move(values);
  m.provenance.model = "test";
  return m;
}

TEST(ShiftedLog, Examples) {
  const ClosedFormMatrix l = shifted_log(deepwalk_matrix(testing::k3(), 2, 1.0));
  EXPECT_EQ(l.kind, MatrixKind::kLogShifted);
  EXPECT_EQ(l.values(1, 1), 0.0);
  EXPECT_NEAR(l.values(1, 2), 0.1178, 1e-4);

  EXPECT_EQ(shifted_log(similarity(DenseMatrix::Constant(3, 4, 0.5))).values.cwiseAbs().maxCoeff(), 0.0);

  DenseMatrix neg(2, 2);
  neg << -3.0, std::exp(2.0), 1.0, -1e300;
  const DenseMatrix out = shifted_log(similarity(neg)).values;
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_NEAR(out(0, 1), 2.0, 1e-15);
  EXPECT_EQ(out(1, 0), 0.0);
  EXPECT_EQ(out(1, 1), 0.0);
  EXPECT_EQ(shifted(neg)(0, 0), 1.0);
}

TEST(ShiftedLog, RejectsWrongKind) {
  ClosedFormMatrix l = shifted_log(line_matrix(testing::k3(), 1.0));
  EXPECT_THROW(shifted_log(l), ParameterError);
}

TEST(ShiftedLog, OutputsAreFiniteAndNonnegative) {
  for (const Graph& g : testing::random_graphs(10, 5, 60, 0.1, 51, true)) {
    const DenseMatrix l = shifted_log(deepwalk_matrix(g, 5, 1.0)).values;
    EXPECT_TRUE(l.allFinite());
    EXPECT_GE(l.minCoeff(), 0.0);
  }
}

TEST(TruncatedSvd, TriangleLogMatrix) {
  const double c = frozen("k3_logdw_t2_off");
  const DenseMatrix a = shifted_log(deepwalk_matrix(testing::k3(), 2, 1.0)).values;
  const SvdResult r = truncated_svd(a, 2);
  EXPECT_NEAR(r.singular_values[0], 2 * c, 1e-14);
  EXPECT_NEAR(r.singular_values[1], c, 1e-14);
  EXPECT_NEAR(r.discarded_norm, c, 1e-14);
  EXPECT_NEAR(r.discarded_norm, 0.1178, 1e-4);
  const DenseMatrix recon = r.u * r.singular_values.asDiagonal() * r.v.transpose();
  EXPECT_NEAR((a - recon).norm(), r.discarded_norm, 1e-12);
  EXPECT_FALSE(r.randomized);
}

TEST(TruncatedSvd, DiagonalFullRank) {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a.diagonal() << 3.0, 2.0, 1.0;
  const SvdResult r = truncated_svd(a, 3);
  EXPECT_LE((r.singular_values - Vector::LinSpaced(3, 3.0, 1.0)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(r.discarded_norm, 1e-12);
  EXPECT_LE(max_abs(r.u * r.singular_values.asDiagonal() * r.v.transpose(), a), 1e-12);
  EXPECT_LE(max_abs(r.u, DenseMatrix::Identity(3, 3)), 1e-14);
}

TEST(TruncatedSvd, ZeroMatrix) {
  const SvdResult r = truncated_svd(DenseMatrix::Zero(5, 5), 3);
  EXPECT_EQ(r.singular_values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.discarded_norm, 0.0);
  ClosedFormMatrix zero = shifted_log(similarity(DenseMatrix::Constant(5, 5, 0.2)));
  const Embedding e = factorize(zero, 3);
  EXPECT_EQ(e.vectors.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TruncatedSvd, ResidualIdentityAndSigns) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const Index rows = 20 + trial * 7;
    const Index cols = 15 + trial * 5;
    DenseMatrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) a(i, j) = normal(rng);
    const Index d = 1 + trial;
    const SvdResult r = truncated_svd(a, d);
    ASSERT_EQ(r.u.cols(), d);
    const double residual = (a - r.u * r.singular_values.asDiagonal() * r.v.transpose()).norm();
    EXPECT_NEAR(residual, r.discarded_norm, 1e-8);
    Eigen::JacobiSVD<DenseMatrix> ref(a);
    const Vector all = ref.singularValues();
    EXPECT_NEAR(r.discarded_norm, all.tail(all.size() - d).norm(), 1e-10);
    for (Index k = 0; k < d; ++k) {
      Index arg = 0;
      const double top = r.u.col(k).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(r.u(arg, k), 0.0);
      EXPECT_NEAR(std::abs(r.u(arg, k)), top, 0.0);
      EXPECT_NEAR(r.singular_values[k], all[k], 1e-10);
    }
  }
}

TEST(TruncatedSvd, RandomizedAgreesWithFull) {
  // Geometrically decaying spectrum, the regime the range finder targets.
  std::mt19937_64 rng(53);
  std::normal_distribution<double> normal;
  const Index n = 150;
  DenseMatrix g1(n, n);
  DenseMatrix g2(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      g1(i, j) = normal(rng);
      g2(i, j) = normal(rng);
    }
  const DenseMatrix q1 = Eigen::HouseholderQR<DenseMatrix>(g1).householderQ();
  const DenseMatrix q2 = Eigen::HouseholderQR<DenseMatrix>(g2).householderQ();
  Vector sigma(n);
  for (Index i = 0; i < n; ++i) sigma[i] = std::pow(0.8, i);
  const DenseMatrix a = q1 * sigma.asDiagonal() * q2.transpose();
  SvdOptions forced;
  forced.full_threshold = 10;
  const SvdResult fast = truncated_svd(a, 8, forced);
  const SvdResult full = truncated_svd(a, 8);
  EXPECT_TRUE(fast.randomized);
  EXPECT_FALSE(full.randomized);
  EXPECT_LE((fast.singular_values - sigma.head(8)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((full.singular_values - sigma.head(8)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(fast.discarded_norm, full.discarded_norm, 1e-8);
  EXPECT_LE((fast.u - full.u).cwiseAbs().maxCoeff(), 1e-6);

  // Flat spectra converge slowly; the randomized estimate stays close.
  const Graph g = testing::random_graphs(1, 150, 150, 0.05, 53)[0];
  const DenseMatrix l = shifted_log(deepwalk_matrix(g, 5, 1.0)).values;
  const SvdResult rough = truncated_svd(l, 8, forced);
  const SvdResult exact = truncated_svd(l, 8);
  EXPECT_LE((rough.singular_values - exact.singular_values).cwiseAbs().maxCoeff(),
            1e-2 * exact.singular_values[0]);
  EXPECT_GE(rough.discarded_norm, exact.discarded_norm - 1e-9);
}

TEST(TruncatedSvd, Errors) {
  EXPECT_THROW(truncated_svd(DenseMatrix::Identity(3, 3), 0), ParameterError);
  EXPECT_THROW(truncated_svd(DenseMatrix::Identity(3, 3), 4), ParameterError);
  DenseMatrix bad = DenseMatrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(truncated_svd(bad, 1), ValidationError);
}

TEST(NetmfExact, TriangleSymmetry) {
  // sigma = (2c, c, c): with d = 3 the Gram matrix is c(I + J/3), so norms and
  // pairwise products are uniform. d = 2 would split a degenerate pair.
  const double c = frozen("k3_logdw_t2_off");
  const Embedding e = netmf_exact(testing::k3(), 2, 1.0, 3);
  const DenseMatrix gram = e.vectors * e.vectors.transpose();
  for (Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(gram(i, i), c * (1.0 + 1.0 / 3.0), 1e-12);
    for (Index j = 0; j < 3; ++j)
      if (i != j) EXPECT_NEAR(gram(i, j), c / 3.0, 1e-12);
  }
  const Embedding one = netmf_exact(testing::k3(), 2, 1.0, 1);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(one.vectors(i, 0), std::sqrt(2 * c / 3), 1e-12);
  EXPECT_EQ(e.provenance.describe().rfind("model=netmf-exact", 0), 0u);
}

TEST(NetmfExact, FullRankReconstruction) {
  for (const Graph& g : testing::random_graphs(5, 5, 40, 0.15, 54, true)) {
    NetmfOptions opts;
    opts.keep_context = true;
    const Embedding e = netmf_exact(g, 3, 1.0, g.num_vertices(), opts);
    ASSERT_TRUE(e.context.has_value());
    const DenseMatrix l = shifted_log(deepwalk_matrix(g, 3, 1.0)).values;
    EXPECT_LE(max_abs(e.vectors * e.context->transpose(), l), 1e-8);
    EXPECT_TRUE(e.vectors.allFinite());
    for (Index k = 1; k < e.dim(); ++k) EXPECT_GE(e.singular_values[k - 1], e.singular_values[k]);
  }
}

TEST(NetmfExact, PermutationEquivariance) {
  const Graph g = testing::random_graphs(1, 30, 30, 0.15, 55, true)[0];
  const Index n = g.num_vertices();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(56));
  std::vector<Edge> edges;
  const SparseMatrix& a = g.adjacency();
  for (Index u = 0; u < n; ++u)
    for (SparseMatrix::InnerIterator it(a, u); it; ++it)
      if (it.col() >= u) edges.push_back({perm[u], perm[static_cast<std::size_t>(it.col())], it.value()});
  const Graph h = graph_from_edges(n, edges);
  const Index d = 6;
  const Embedding eg = netmf_exact(g, 4, 1.0, d);
  const Embedding eh = netmf_exact(h, 4, 1.0, d);
  EXPECT_LE((eg.singular_values - eh.singular_values).cwiseAbs().maxCoeff(), 1e-10);
  // Each column matches up to the shared sign rule; degenerate gaps would make
  // this ill-posed, so require a clear spectral gap first.
  for (Index k = 0; k + 1 < d; ++k)
    ASSERT_GT(eg.singular_values[k] - eg.singular_values[k + 1], 1e-6);
  for (Index v = 0; v < n; ++v)
    EXPECT_LE((eg.vectors.row(v) - eh.vectors.row(perm[v])).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(NetmfApprox, FullRankMatchesExact) {
  for (const Graph& g : {testing::k3(), testing::karate()}) {
    const Index d = std::min<Index>(g.num_vertices(), 8);
    const Embedding exact = netmf_exact(g, 10, 1.0, d);
    const Embedding approx = netmf_approx(g, 10, 1.0, g.num_vertices(), d);
    // K3 has a repeated singular value, so only the Gram matrix is unique there.
    EXPECT_LE(max_abs(exact.vectors * exact.vectors.transpose(), approx.vectors * approx.vectors.transpose()),
              1e-6);
    bool separated = true;
    for (Index k = 0; k + 1 < d; ++k)
      separated &= exact.singular_values[k] - exact.singular_values[k + 1] > 1e-6;
    if (separated) EXPECT_LE(max_abs(exact.vectors, approx.vectors), 1e-6);
    EXPECT_EQ(approx.provenance.model, "netmf-approx");
  }
}

TEST(NetmfApprox, TriangleRankOneIsZero) {
  const Embedding e = netmf_approx(testing::k3(), 2, 1.0, 1, 2);
  EXPECT_LE(e.vectors.cwiseAbs().maxCoeff(), 1e-7);
}

TEST(NetmfApprox, FilterOrderingUsesDenseEigenpairs) {
  NetmfOptions opts;
  opts.ordering = EigenOrdering::kFilterMagnitude;
  const Graph g = testing::karate();
  const EigenPairs pairs = select_eigenpairs(g, 5, 10, EigenOrdering::kFilterMagnitude, opts);
  const EigenPairs all = dense_eigenpairs(DenseMatrix(normalized_adjacency(g)));
  const auto order = filter_magnitude_order(all.values, 10);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(pairs.values[i], all.values[order[i]], 1e-12);
  opts.limits.max_vertices = 10;
  EXPECT_THROW(netmf_approx(g, 10, 1.0, 5, 2, opts), CapacityError);
}

TEST(ErrorReport, TriangleRankOneTight) {
  const Graph g = testing::k3();
  const DenseMatrix m = deepwalk_matrix(g, 2, 1.0).values;
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), 1);
  const DenseMatrix hat = approximate_similarity(g, pairs, 2, 1.0).values;
  Vector excluded(2);
  excluded << -0.5, -0.5;
  const ErrorReport r = error_report(m, hat, excluded, 2, 1.0, g);
  EXPECT_NEAR(r.similarity_error, frozen("k3_h1_error"), 1e-12);
  EXPECT_NEAR(r.bound, frozen("k3_h1_bound"), 1e-12);
  EXPECT_NEAR(r.bound, 0.5303, 1e-4);
  EXPECT_TRUE(r.chain_holds);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_NEAR(r.bound_slack(), 0.0, 1e-12);
}

TEST(ErrorReport, NothingExcluded) {
  const Graph g = testing::karate();
  const DenseMatrix m = deepwalk_matrix(g, 10, 1.0).values;
  const DenseMatrix hat =
      approximate_similarity(g, top_eigenpairs(normalized_adjacency(g), 34), 10, 1.0).values;
  const ErrorReport r = error_report(m, hat, Vector(), 10, 1.0, g);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_LE(r.similarity_error, 1e-8);
  EXPECT_LE(r.shifted_error, 1e-8);
  EXPECT_LE(r.log_error, 1e-8);
  EXPECT_TRUE(r.chain_holds);
  EXPECT_TRUE(r.bound_holds);
}

TEST(ErrorReport, ChainOnDenseRandomGraph) {
  const Graph g = random_connected_graph(50, 0.2, 57);
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), 25);
  const EigenPairs all = dense_eigenpairs(DenseMatrix(normalized_adjacency(g)));
  const Vector excluded = all.values.tail(25);
  const DenseMatrix m = deepwalk_matrix(g, 10, 1.0).values;
  const ErrorReport r =
      error_report(m, approximate_similarity(g, pairs, 10, 1.0).values, excluded, 10, 1.0, g);
  EXPECT_TRUE(r.chain_holds);
  EXPECT_GE(r.log_slack(), -1e-10);
  EXPECT_GE(r.shifted_slack(), -1e-10);
}

TEST(ErrorReport, BoundUnderFilterOrderingOnRandomGraphs) {
  for (const Graph& g : testing::random_graphs(20, 5, 80, 0.1, 58, true)) {
    const Index n = g.num_vertices();
    const EigenPairs all = dense_eigenpairs(DenseMatrix(normalized_adjacency(g)));
    for (int t : {1, 2, 10}) {
      const DenseMatrix m = deepwalk_matrix(g, t, 1.0).values;
      const auto order = filter_magnitude_order(all.values, t);
      for (Index h : {(n + 3) / 4, (n + 1) / 2, n}) {
        const std::vector<Index> keep(order.begin(), order.begin() + h);
        const std::vector<Index> drop(order.begin() + h, order.end());
        const EigenPairs excluded = all.select(drop);
        const DenseMatrix hat = approximate_similarity(g, all.select(keep), t, 1.0).values;
        const ErrorReport r = error_report(m, hat, excluded.values, t, 1.0, g);
        EXPECT_TRUE(r.chain_holds) << "n=" << n << " T=" << t << " h=" << h;
        EXPECT_TRUE(r.bound_holds) << "n=" << n << " T=" << t << " h=" << h << " slack "
                                   << r.bound_slack();
      }
    }
  }
}

TEST(ErrorReport, ShapeMismatch) {
  EXPECT_THROW(error_report(DenseMatrix::Zero(3, 3), DenseMatrix::Zero(2, 2), Vector(), 2, 1.0,
                            testing::k3()),
               ValidationError);
}

TEST(Determinism, EmbeddingIndependentOfThreads) {
  const Graph g = testing::karate();
  set_thread_count(1);
  const Embedding a = netmf_exact(g, 10, 1.0, 8);
  const Embedding c = netmf_approx(g, 10, 1.0, 16, 8);
  set_thread_count(4);
  const Embedding b = netmf_exact(g, 10, 1.0, 8);
  const Embedding d = netmf_approx(g, 10, 1.0, 16, 8);
  set_thread_count(0);
  EXPECT_EQ(max_abs(a.vectors, b.vectors), 0.0);
  EXPECT_EQ(max_abs(c.vectors, d.vectors), 0.0);
}

TEST(Determinism, KarateSingularValuesFrozen) {
  const Embedding e = netmf_exact(testing::karate(), 10, 1.0, 4);
  EXPECT_NEAR(e.singular_values[0], frozen("karate_logdw_t10_sv1"), 1e-10);
  EXPECT_NEAR(e.singular_values[1], frozen("karate_logdw_t10_sv2"), 1e-10);
  EXPECT_NEAR(e.singular_values[2], frozen("karate_logdw_t10_sv3"), 1e-10);
  EXPECT_NEAR(e.singular_values[3], frozen("karate_logdw_t10_sv4"), 1e-10);
}

}  // namespace
}  // namespace netmf
