#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "netmf/closed_form.hpp"
#include "netmf/errors.hpp"
#include "netmf/factorize.hpp"
#include "netmf/spectral.hpp"
#include "oracles.hpp"

namespace netmf {
namespace {

using testing::frozen;

double max_abs(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void expect_pair_invariants(const SparseMatrix& s, const EigenPairs& pairs, double tol) {
  const Index h = pairs.count();
  const DenseMatrix gram = pairs.vectors.transpose() * pairs.vectors;
  EXPECT_LE(max_abs(gram, DenseMatrix::Identity(h, h)), 1e-8);
  for (Index i = 0; i < h; ++i) {
    const double r = (s * pairs.vectors.col(i) - pairs.values[i] * pairs.vectors.col(i)).norm();
    EXPECT_LE(r, std::max(tol, 1e-9));
    EXPECT_LE(pairs.residuals[i], std::max(tol, 1e-9));
    if (i > 0) EXPECT_GE(pairs.values[i - 1], pairs.values[i]);
  }
  if (h > 0) EXPECT_LE(pairs.values[0], 1.0 + 1e-10);
}

TEST(TopEigenpairs, TriangleFullSpectrum) {
  const SparseMatrix s = normalized_adjacency(testing::k3());
  const EigenPairs pairs = top_eigenpairs(s, 3);
  ASSERT_EQ(pairs.count(), 3);
  EXPECT_NEAR(pairs.values[0], 1.0, 1e-12);
  EXPECT_NEAR(pairs.values[1], -0.5, 1e-12);
  EXPECT_NEAR(pairs.values[2], -0.5, 1e-12);
  expect_pair_invariants(s, pairs, 1e-10);
}

TEST(TopEigenpairs, PerronVectorIsSqrtDegree) {
  for (const Graph& g : testing::random_graphs(10, 5, 120, 0.06, 41, true)) {
    const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), 1);
    EXPECT_NEAR(pairs.values[0], 1.0, 1e-10);
    const Vector expect = g.degrees().cwiseSqrt().normalized();
    EXPECT_LE((pairs.vectors.col(0) - expect).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(TopEigenpairs, KarateSpectrumMatchesFrozen) {
  const SparseMatrix s = normalized_adjacency(testing::karate());
  const EigenPairs pairs = top_eigenpairs(s, 34);
  EXPECT_NEAR(pairs.values[1], frozen("karate_lambda_2"), 1e-10);
  EXPECT_NEAR(pairs.values[33], frozen("karate_lambda_min"), 1e-10);
  expect_pair_invariants(s, pairs, 1e-10);
}

TEST(TopEigenpairs, AgreesWithDenseOnRandomGraphs) {
  for (const Graph& g : testing::random_graphs(12, 10, 150, 0.05, 42, true)) {
    const SparseMatrix s = normalized_adjacency(g);
    const EigenPairs dense = dense_eigenpairs(DenseMatrix(s));
    const Index n = g.num_vertices();
    for (Index h : {Index{1}, std::max<Index>(1, n / 3), n}) {
      const EigenPairs pairs = top_eigenpairs(s, h);
      ASSERT_EQ(pairs.count(), h);
      expect_pair_invariants(s, pairs, 1e-10);
      for (Index i = 0; i < h; ++i) EXPECT_NEAR(pairs.values[i], dense.values[i], 1e-9);
      // Projectors onto the top-h subspace agree even when eigenvalues repeat
      // across the cut only if the gap is open; check the filtered products.
      if (h == n) {
        const DenseMatrix a = pairs.vectors * pairs.values.asDiagonal() * pairs.vectors.transpose();
        EXPECT_LE(max_abs(a, DenseMatrix(s)), 1e-9);
      }
    }
  }
}

TEST(TopEigenpairs, RepeatedEigenvaluesOnStarAndComplete) {
  // S_6 has eigenvalue 0 with multiplicity 4; K6 has -1/5 with multiplicity 5.
  for (const Graph& g : {testing::star(6), testing::from_text("0 1\n0 2\n0 3\n0 4\n0 5\n1 2\n1 3\n1 4\n"
                                                               "1 5\n2 3\n2 4\n2 5\n3 4\n3 5\n4 5\n")}) {
    const SparseMatrix s = normalized_adjacency(g);
    const EigenPairs pairs = top_eigenpairs(s, g.num_vertices());
    expect_pair_invariants(s, pairs, 1e-10);
    const EigenPairs dense = dense_eigenpairs(DenseMatrix(s));
    EXPECT_LE((pairs.values - dense.values).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TopEigenpairs, DeterministicForSeed) {
  const SparseMatrix s = normalized_adjacency(testing::karate());
  LanczosOptions opts;
  opts.seed = 7;
  const EigenPairs a = top_eigenpairs(s, 5, opts);
  const EigenPairs b = top_eigenpairs(s, 5, opts);
  EXPECT_EQ(max_abs(a.vectors, b.vectors), 0.0);
  EXPECT_EQ((a.values - b.values).cwiseAbs().maxCoeff(), 0.0);
  opts.seed = 8;
  const EigenPairs c = top_eigenpairs(s, 5, opts);
  EXPECT_LE((a.values - c.values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(max_abs(a.vectors, c.vectors), 1e-6);  // sign convention pins the vectors
}

TEST(TopEigenpairs, RejectsBadRank) {
  const SparseMatrix s = normalized_adjacency(testing::k3());
  EXPECT_THROW(top_eigenpairs(s, 0), ParameterError);
  EXPECT_THROW(top_eigenpairs(s, 4), ParameterError);
}

TEST(TopEigenpairs, ThickRestartsConvergeUnderSmallCap) {
  const SparseMatrix s = normalized_adjacency(testing::random_graphs(1, 400, 400, 0.03, 46)[0]);
  const EigenPairs dense = dense_eigenpairs(DenseMatrix(s));
  LanczosOptions opts;
  opts.max_iter = 30;
  const EigenPairs pairs = top_eigenpairs(s, 8, opts);
  expect_pair_invariants(s, pairs, 1e-9);
  EXPECT_LE((pairs.values - dense.values.head(8)).cwiseAbs().maxCoeff(), 1e-9);
  opts.max_restarts = 0;
  EXPECT_THROW(top_eigenpairs(s, 8, opts), ConvergenceError);
}

TEST(TopEigenpairs, TinyIterationBudgetFails) {
  const SparseMatrix s = normalized_adjacency(testing::random_graphs(1, 300, 300, 0.02, 43)[0]);
  LanczosOptions opts;
  opts.max_iter = 12;
  opts.max_restarts = 0;
  opts.tol = 1e-14;
  try {
    top_eigenpairs(s, 10, opts);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residuals().size(), 10u);
  }
}

TEST(WindowFilter, Examples) {
  for (int t : {1, 2, 5, 10, 37}) EXPECT_NEAR(window_filter(1.0, t), 1.0, 1e-15);
  EXPECT_NEAR(window_filter(-1.0, 10), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(window_filter(0.5, 2), 0.375);
  EXPECT_THROW(window_filter(0.5, 0), ParameterError);
}

TEST(WindowFilter, GridProperties) {
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + i * 0.01;
    EXPECT_NEAR(window_filter(x, 1), x, 1e-15);
    for (int t : {1, 2, 5, 10}) EXPECT_NEAR(window_filter(x, t), testing::oracle_filter(x, t), 1e-14);
    if (x > 0.0 && x < 1.0) {
      EXPECT_GT(window_filter(x, 1), window_filter(x, 2));
      EXPECT_GT(window_filter(x, 2), window_filter(x, 5));
      EXPECT_GT(window_filter(x, 5), window_filter(x, 10));
    }
  }
}

TEST(WindowFilter, EigenFilterConsistency) {
  for (const Graph& g : testing::random_graphs(8, 5, 200, 0.05, 44, true)) {
    const DenseMatrix s(normalized_adjacency(g));
    const EigenPairs pairs = dense_eigenpairs(s);
    for (int t : {1, 3, 10}) {
      Vector f(pairs.count());
      for (Index i = 0; i < pairs.count(); ++i) f[i] = window_filter(pairs.values[i], t);
      const DenseMatrix lhs = pairs.vectors * f.asDiagonal() * pairs.vectors.transpose();
      DenseMatrix power = DenseMatrix::Identity(s.rows(), s.cols());
      DenseMatrix sum = DenseMatrix::Zero(s.rows(), s.cols());
      for (int r = 1; r <= t; ++r) {
        power = power * s;
        sum += power;
      }
      EXPECT_LE(max_abs(lhs, sum / t), 1e-8);
    }
  }
}

TEST(ApproximateSimilarity, TriangleFullRankIsExact) {
  const Graph g = testing::k3();
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), 3);
  const ClosedFormMatrix hat = approximate_similarity(g, pairs, 2, 1.0);
  EXPECT_EQ(hat.kind, MatrixKind::kSimilarity);
  EXPECT_LE(max_abs(hat.values, deepwalk_matrix(g, 2, 1.0).values), 1e-10);
}

TEST(ApproximateSimilarity, TriangleRankOne) {
  const Graph g = testing::k3();
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), 1);
  const ClosedFormMatrix hat = approximate_similarity(g, pairs, 2, 1.0);
  EXPECT_LE(max_abs(hat.values, DenseMatrix::Ones(3, 3)), 1e-12);
  const double err = (deepwalk_matrix(g, 2, 1.0).values - hat.values).norm();
  EXPECT_NEAR(err, 0.5303, 1e-4);
  EXPECT_NEAR(err, frozen("k3_h1_error"), 1e-12);
}

TEST(ApproximateSimilarity, FullRankMatchesExactOnRandomGraphs) {
  for (const Graph& g : testing::random_graphs(8, 5, 80, 0.1, 45, true)) {
    const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), g.num_vertices());
    for (int t : {1, 4, 10}) {
      const DenseMatrix hat = approximate_similarity(g, pairs, t, 1.0).values;
      const DenseMatrix m = deepwalk_matrix(g, t, 1.0).values;
      EXPECT_LE(max_abs(hat, m), 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff()));
      EXPECT_LE(max_abs(hat, hat.transpose()), 1e-10);
    }
  }
}

TEST(ApproximateSimilarity, Errors) {
  const Graph g = testing::k3();
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(testing::karate()), 2);
  EXPECT_THROW(approximate_similarity(g, pairs, 2, 1.0), ValidationError);
  const EigenPairs ok = top_eigenpairs(normalized_adjacency(g), 1);
  EXPECT_THROW(approximate_similarity(g, ok, 2, 0.0), ParameterError);
  EXPECT_THROW(approximate_similarity(g, ok, 0, 1.0), ParameterError);
}

TEST(ApproximateSimilarity, ErrorShrinksAsBoundOrderingKeepsMore) {
  // Under |f| ordering each added pair removes a nonnegative-norm term from the
  // residual of (1/T) sum S^r; the similarity is a congruence of that, so the
  // error is probed here rather than derived.
  for (const Graph& g : testing::random_graphs(5, 20, 60, 0.1, 46)) {
    const EigenPairs all = dense_eigenpairs(DenseMatrix(normalized_adjacency(g)));
    const std::vector<Index> order = filter_magnitude_order(all.values, 10);
    const DenseMatrix m = deepwalk_matrix(g, 10, 1.0).values;
    double previous = std::numeric_limits<double>::infinity();
    for (Index h = 1; h <= g.num_vertices(); ++h) {
      const std::vector<Index> keep(order.begin(), order.begin() + h);
      const double err = (m - approximate_similarity(g, all.select(keep), 10, 1.0).values).norm();
      EXPECT_LE(err, previous + 1e-10) << "h=" << h;
      previous = err;
    }
    EXPECT_LE(previous, 1e-8);
  }
}

TEST(FilterMagnitudeOrder, SortsByAbsoluteFilter) {
  Vector v(4);
  v << 1.0, 0.5, -1.0, -0.9;
  const auto order = filter_magnitude_order(v, 1);
  EXPECT_EQ(order, (std::vector<Index>{0, 2, 3, 1}));
  const auto even = filter_magnitude_order(v, 2);
  // f(-1, 2) = 0 goes last; f(-0.9, 2) = -0.045.
  EXPECT_EQ(even.front(), 0);
  EXPECT_EQ(even.back(), 2);
}

TEST(VerifyBounds, TriangleIsTight) {
  const SpectralReport r = verify_bounds(testing::k3(), 2);
  ASSERT_EQ(r.singular_values.size(), 3);
  EXPECT_NEAR(r.singular_values[0], 0.5, 1e-14);
  EXPECT_NEAR(r.singular_values[1], 0.0625, 1e-14);
  EXPECT_NEAR(r.singular_values[2], 0.0625, 1e-14);
  EXPECT_LE((r.singular_values - r.singular_bounds).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.singular_slack, 0.0, 1e-14);
}

TEST(VerifyBounds, StarIsStrict) {
  const SpectralReport r = verify_bounds(testing::star(4), 1);
  EXPECT_TRUE(r.passed());
  // Zero singular values meet zero bounds; the leading one is strictly inside.
  EXPECT_GT(r.singular_bounds[0] - r.singular_values[0], 1e-6);
  EXPECT_GE(r.rayleigh_slack, -1e-10);
}

TEST(VerifyBounds, NonnegativeSpectrumMakesMinCheckTrivial) {
  // Two heavy self-loops: S has eigenvalues 1 and 9/11.
  const Graph g = graph_from_edges(2, {{0, 0, 10.0}, {1, 1, 10.0}, {0, 1, 1.0}});
  const SpectralReport r = verify_bounds(g, 3);
  EXPECT_GE(r.eigenvalues.minCoeff(), 0.0);
  EXPECT_GE(r.interior_min, 0.0);
  EXPECT_GE(r.rayleigh_bound, 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(VerifyBounds, HoldsOnRandomGraphs) {
  for (const Graph& g : testing::random_graphs(20, 5, 120, 0.06, 47, true)) {
    for (int t : {1, 2, 5, 10}) {
      const SpectralReport r = verify_bounds(g, t);
      EXPECT_TRUE(r.passed()) << "n=" << g.num_vertices() << " T=" << t << " slack "
                              << r.singular_slack << " / " << r.rayleigh_slack;
      for (Index i = 1; i < r.singular_bounds.size(); ++i) {
        EXPECT_GE(r.singular_bounds[i - 1], r.singular_bounds[i]);
        EXPECT_GE(r.singular_values[i - 1], r.singular_values[i]);
      }
    }
  }
}

TEST(VerifyBounds, CapacityGuard) {
  BoundOptions opts;
  opts.max_vertices = 10;
  EXPECT_THROW(verify_bounds(testing::karate(), 2, opts), CapacityError);
}

}  // namespace
}  // namespace netmf
