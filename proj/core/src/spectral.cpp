#include "netmf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "netmf/errors.hpp"

namespace netmf {

namespace {

// Flips each column so its first component above `eps` in magnitude is positive.
void normalize_signs(DenseMatrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double eps = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > eps) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
}

template <class Op>
Vector explicit_residuals(const Op& apply, const Vector& values, const DenseMatrix& vectors) {
  Vector res(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    Vector su = apply(vectors.col(j));
    res[j] = (su - values[j] * vectors.col(j)).norm();
  }
  return res;
}

}  // namespace

EigenPairs EigenPairs::select(const std::vector<Index>& positions) const {
  EigenPairs out;
  const auto k = static_cast<Eigen::Index>(positions.size());
  out.values.resize(k);
  out.vectors.resize(vectors.rows(), k);
  out.residuals.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Index p = positions[static_cast<std::size_t>(i)];
    if (p < 0 || p >= count()) throw ParameterError("eigenpair position out of range");
    out.values[i] = values[p];
    out.vectors.col(i) = vectors.col(p);
    out.residuals[i] = residuals.size() > p ? residuals[p] : 0.0;
  }
  return out;
}

EigenPairs top_eigenpairs(const SparseMatrix& s, Index h, const LanczosOptions& options) {
  const Index n = static_cast<Index>(s.rows());
  if (s.cols() != n) throw ParameterError("eigensolver input must be square");
  if (h < 1 || h > n)
    throw ParameterError("requested " + std::to_string(h) + " eigenpairs of a " +
                         std::to_string(n) + "-dimensional matrix");
  if (!(options.tol > 0.0)) throw ParameterError("eigensolver tolerance must be positive");
  Index kmax = options.max_iter > 0 ? std::min(n, options.max_iter)
                                    : std::min(n, std::max<Index>(4 * h, h + 100));
  if (kmax < h) throw ParameterError("Krylov dimension cap is smaller than h");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  DenseMatrix basis(n, kmax);
  // Projected matrix basis^T S basis, filled column by column from the
  // Gram-Schmidt coefficients. Tridiagonal until the first restart.
  DenseMatrix projected = DenseMatrix::Zero(kmax, kmax);

  // Fills column k with a random unit vector orthogonal to columns [0, k).
  auto fresh_column = [&](Index k) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector v(n);
      for (Index i = 0; i < n; ++i) v[i] = uniform(rng);
      for (int pass = 0; pass < 2; ++pass)
        if (k > 0) v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
      const double norm = v.norm();
      if (norm > 1e-8) {
        basis.col(k) = v / norm;
        return;
      }
    }
    throw InternalError("could not extend the Lanczos basis");
  };

  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig;
  Vector ritz_values;
  DenseMatrix ritz_vectors;
  Vector estimates;
  Index dim = 0;
  bool converged = false;

  // Solves the projected problem of size m and sets the residual estimates
  // |coupling * y_{m-1,i}| for the h largest Ritz pairs.
  auto solve_projected = [&](Index m, double coupling) {
    eig.compute(projected.topLeftCorner(m, m), Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) throw InternalError("projected eigensolver failed");
    ritz_values = eig.eigenvalues();
    ritz_vectors = eig.eigenvectors();
    estimates.resize(h);
    for (Index i = 0; i < h; ++i) {
      const Index col = m - 1 - i;  // ascending storage, take from the top
      estimates[i] = std::abs(coupling * ritz_vectors(m - 1, col));
    }
    return estimates.maxCoeff() <= options.tol;
  };

  // Keeps the leading Ritz vectors plus a buffer, then reseeds from w.
  const Index keep = std::min(kmax - 1, h + (kmax - h) / 2);
  int restarts = 0;
  long matvecs = 0;

  fresh_column(0);
  Index next_check = h;
  Index k = 0;
  while (true) {
    Vector w = s * basis.col(k);
    ++matvecs;
    Vector coeff = basis.leftCols(k + 1).transpose() * w;
    w -= basis.leftCols(k + 1) * coeff;
    const Vector again = basis.leftCols(k + 1).transpose() * w;
    w -= basis.leftCols(k + 1) * again;
    coeff += again;
    projected.col(k).head(k + 1) = coeff;
    projected.row(k).head(k + 1) = coeff.transpose();
    const double b = w.norm();
    dim = k + 1;

    if (dim == n) {
      // Whole space spanned: the projection is exact.
      solve_projected(dim, 0.0);
      converged = true;
      break;
    }
    const bool breakdown = b <= 1e-10;
    if (!breakdown && dim >= next_check) {
      if (solve_projected(dim, b)) {
        converged = true;
        break;
      }
      next_check = dim + std::max<Index>(10, dim / 8);
    }
    if (dim == kmax) {
      if (breakdown) {
        converged = solve_projected(dim, 0.0);
        if (converged) break;
      } else if (solve_projected(dim, b)) {
        converged = true;
        break;
      }
      if (restarts == options.max_restarts || keep < h) break;
      ++restarts;
      // Thick restart: S V Y = V Y Theta + w (e_m^T Y), so the kept Ritz
      // vectors couple to w/b through the last row of Y.
      const DenseMatrix y = ritz_vectors.rightCols(keep);
      const DenseMatrix kept = basis.leftCols(dim) * y;
      basis.leftCols(keep) = kept;
      projected.setZero();
      projected.topLeftCorner(keep, keep) = ritz_values.tail(keep).asDiagonal();
      k = keep;
      next_check = keep + std::max<Index>(10, keep / 8);
    } else {
      ++k;
    }
    if (breakdown) {
      // Invariant subspace found; continue in its orthogonal complement so
      // further copies of repeated eigenvalues are reachable.
      fresh_column(k);
    } else {
      basis.col(k) = w / b;
    }
  }
  if (!converged) {
    std::vector<double> est(estimates.data(), estimates.data() + estimates.size());
    throw ConvergenceError("Lanczos did not converge within " + std::to_string(matvecs) +
                               " products and " + std::to_string(restarts) +
                               " restarts (max Ritz residual " +
                               std::to_string(estimates.size() ? estimates.maxCoeff() : -1.0) +
                               ")",
                           std::move(est));
  }

  EigenPairs out;
  out.values.resize(h);
  DenseMatrix y(dim, h);
  for (Index i = 0; i < h; ++i) {
    out.values[i] = ritz_values[dim - 1 - i];
    y.col(i) = ritz_vectors.col(dim - 1 - i);
  }
  out.vectors = basis.leftCols(dim) * y;
  normalize_signs(out.vectors);
  out.residuals = explicit_residuals(
      [&](const auto& u) -> Vector { return s * u; }, out.values, out.vectors);
  return out;
}

EigenPairs dense_eigenpairs(const DenseMatrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(symmetric);
  if (solver.info() != Eigen::Success) throw InternalError("dense eigensolver failed");
  const Index n = static_cast<Index>(symmetric.rows());
  EigenPairs out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  normalize_signs(out.vectors);
  (void)n;
  out.residuals = explicit_residuals(
      [&](const auto& u) -> Vector { return symmetric * u; }, out.values, out.vectors);
  return out;
}

double window_filter(double x, int window) {
  if (window < 1) throw ParameterError("window size T must be at least 1");
  double acc = 1.0;
  for (int r = 1; r < window; ++r) acc = 1.0 + x * acc;
  return x * acc / window;
}

ClosedFormMatrix approximate_similarity(const Graph& graph, const EigenPairs& pairs, int window,
                                        double negative, const DenseLimits& limits) {
  const Index n = graph.num_vertices();
  if (pairs.vectors.rows() != n || pairs.vectors.cols() != pairs.values.size())
    throw ValidationError("eigenpairs have dimension " + std::to_string(pairs.vectors.rows()) +
                          " but the graph has " + std::to_string(n) + " vertices");
  if (!(negative > 0.0)) throw ParameterError("negative-sample count b must be positive");
  if (n > limits.max_vertices)
    throw CapacityError("dense " + std::to_string(n) + "x" + std::to_string(n) +
                        " approximation exceeds the limit of " +
                        std::to_string(limits.max_vertices));

  const Vector inv_sqrt_d = graph.degrees().cwiseSqrt().cwiseInverse();
  DenseMatrix scaled = inv_sqrt_d.asDiagonal() * pairs.vectors;
  Vector f(pairs.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = window_filter(pairs.values[i], window);
  DenseMatrix weighted = scaled * f.asDiagonal();

  ClosedFormMatrix out;
  out.values.noalias() = weighted * scaled.transpose();
  out.values *= graph.volume() / negative;
  out.kind = MatrixKind::kSimilarity;
  out.provenance.model = "deepwalk-spectral";
  out.provenance.set("T", static_cast<double>(window))
      .set("b", negative)
      .set("h", static_cast<double>(pairs.values.size()))
      .set("n", static_cast<double>(n));
  return out;
}

std::vector<Index> filter_magnitude_order(const Vector& values, int window) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> mag(order.size());
  for (std::size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::abs(window_filter(values[static_cast<Eigen::Index>(i)], window));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return mag[a] > mag[b]; });
  return order;
}

SpectralReport verify_bounds(const Graph& graph, int window, const BoundOptions& options) {
  const Index n = graph.num_vertices();
  if (n > options.max_vertices)
    throw CapacityError("bound verification needs a dense eigendecomposition; " +
                        std::to_string(n) + " vertices exceeds the limit of " +
                        std::to_string(options.max_vertices));
  SpectralReport report;
  report.window = window;
  report.min_degree = graph.min_degree();
  report.max_degree = graph.max_degree();

  const EigenPairs pairs = dense_eigenpairs(DenseMatrix(normalized_adjacency(graph)));
  report.eigenvalues = pairs.values;
  report.filtered.resize(n);
  for (Index i = 0; i < n; ++i) report.filtered[i] = window_filter(pairs.values[i], window);

  // B through matrix powers, independent of the eigen route above.
  DenseMatrix interior = deepwalk_matrix(graph, window, 1.0).values / graph.volume();
  DenseMatrix sym = 0.5 * (interior + interior.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InternalError("dense eigensolver failed");
  report.interior_eigenvalues = solver.eigenvalues().reverse();

  std::vector<double> sigma(static_cast<std::size_t>(n));
  std::vector<double> bound(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    sigma[i] = std::abs(report.interior_eigenvalues[i]);
    bound[i] = std::abs(report.filtered[i]) / graph.min_degree();
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  std::sort(bound.begin(), bound.end(), std::greater<>());
  report.singular_values = Eigen::Map<Vector>(sigma.data(), n);
  report.singular_bounds = Eigen::Map<Vector>(bound.data(), n);
  report.singular_slack = (report.singular_bounds - report.singular_values).minCoeff();
  report.singular_ok = report.singular_slack >= -options.tolerance;

  const double filtered_min = report.filtered.minCoeff();
  const double scale = filtered_min <= 0.0 ? 1.0 / graph.min_degree() : 1.0 / graph.max_degree();
  report.interior_min = report.interior_eigenvalues[n - 1];
  report.rayleigh_bound = scale * filtered_min;
  report.rayleigh_slack = report.interior_min - report.rayleigh_bound;
  report.rayleigh_ok = report.rayleigh_slack >= -options.tolerance;
  return report;
}

}  // namespace netmf
