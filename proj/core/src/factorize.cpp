#include "netmf/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "netmf/errors.hpp"

namespace netmf {

namespace {

void apply_sign_convention(DenseMatrix& u, DenseMatrix& v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (u.rows() > 0 && u(best, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

DenseMatrix orthonormal_basis(const DenseMatrix& m) {
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  return qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
}

SvdResult full_svd(const DenseMatrix& a, Index d) {
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ConvergenceError("SVD did not converge", {});
  SvdResult out;
  const Vector& s = svd.singularValues();
  out.u = svd.matrixU().leftCols(d);
  out.v = svd.matrixV().leftCols(d);
  out.singular_values = s.head(d);
  out.discarded_norm = s.size() > d ? s.tail(s.size() - d).norm() : 0.0;
  return out;
}

SvdResult randomized_svd(const DenseMatrix& a, Index d, const SvdOptions& options) {
  const Index m = static_cast<Index>(a.rows());
  const Index n = static_cast<Index>(a.cols());
  const Index k = std::min<Index>(std::min(m, n), d + std::max(0, options.oversampling));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  DenseMatrix omega(n, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) omega(i, j) = normal(rng);

  DenseMatrix q = orthonormal_basis(a * omega);
  for (int it = 0; it < options.power_iterations; ++it) {
    DenseMatrix z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  DenseMatrix b = q.transpose() * a;
  Eigen::BDCSVD<DenseMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ConvergenceError("SVD did not converge", {});
  SvdResult out;
  out.randomized = true;
  out.u = q * svd.matrixU().leftCols(d);
  out.v = svd.matrixV().leftCols(d);
  out.singular_values = svd.singularValues().head(d);
  const double kept = out.singular_values.squaredNorm();
  out.discarded_norm = std::sqrt(std::max(0.0, a.squaredNorm() - kept));
  return out;
}

void check_rank(Index d, Index limit, const char* what) {
  if (d < 1 || d > limit)
    throw ParameterError(std::string(what) + " must lie in [1, " + std::to_string(limit) +
                         "], got " + std::to_string(d));
}

}  // namespace

const char* to_string(EigenOrdering ordering) noexcept {
  switch (ordering) {
    case EigenOrdering::kAlgebraic: return "algebraic";
    case EigenOrdering::kFilterMagnitude: return "filter-magnitude";
  }
  return "unknown";
}

DenseMatrix shifted(const DenseMatrix& values) { return values.cwiseMax(1.0); }

ClosedFormMatrix shifted_log(const ClosedFormMatrix& similarity) {
  if (similarity.kind != MatrixKind::kSimilarity)
    throw ParameterError(std::string("shifted_log expects a similarity matrix, got ") +
                         to_string(similarity.kind));
  ClosedFormMatrix out;
  out.values = similarity.values.cwiseMax(1.0).array().log().matrix();
  out.kind = MatrixKind::kLogShifted;
  out.provenance = similarity.provenance;
  return out;
}

SvdResult truncated_svd(const DenseMatrix& a, Index d, const SvdOptions& options) {
  const Index limit = static_cast<Index>(std::min(a.rows(), a.cols()));
  check_rank(d, limit, "SVD rank d");
  if (!a.allFinite()) throw ValidationError("SVD input has non-finite entries");
  SvdResult out = limit <= options.full_threshold ? full_svd(a, d) : randomized_svd(a, d, options);
  apply_sign_convention(out.u, out.v);
  return out;
}

Embedding factorize(const ClosedFormMatrix& log_shifted, Index d, const SvdOptions& svd,
                    bool keep_context) {
  SvdResult r = truncated_svd(log_shifted.values, d, svd);
  Embedding e;
  const Vector root = r.singular_values.cwiseSqrt();
  e.vectors = r.u * root.asDiagonal();
  if (keep_context) e.context = DenseMatrix(r.v * root.asDiagonal());
  e.singular_values = r.singular_values;
  e.provenance = log_shifted.provenance;
  e.provenance.set("d", static_cast<double>(d));
  e.provenance.set("svd", r.randomized ? "randomized" : "full");
  return e;
}

Embedding netmf_exact(const Graph& graph, int window, double negative, Index d,
                      const NetmfOptions& options) {
  check_rank(d, graph.num_vertices(), "embedding dimension d");
  ClosedFormMatrix m = deepwalk_matrix(graph, window, negative, options.limits);
  Embedding e = factorize(shifted_log(m), d, options.svd, options.keep_context);
  e.provenance.model = "netmf-exact";
  return e;
}

EigenPairs select_eigenpairs(const Graph& graph, Index h, int window, EigenOrdering ordering,
                             const NetmfOptions& options) {
  const Index n = graph.num_vertices();
  check_rank(h, n, "eigenpair count h");
  if (ordering == EigenOrdering::kAlgebraic)
    return top_eigenpairs(normalized_adjacency(graph), h, options.lanczos);
  if (n > options.limits.max_vertices)
    throw CapacityError("filter-magnitude ordering needs a dense eigendecomposition; " +
                        std::to_string(n) + " vertices exceeds the limit of " +
                        std::to_string(options.limits.max_vertices));
  const EigenPairs all = dense_eigenpairs(DenseMatrix(normalized_adjacency(graph)));
  std::vector<Index> order = filter_magnitude_order(all.values, window);
  order.resize(static_cast<std::size_t>(h));
  return all.select(order);
}

Embedding netmf_approx(const Graph& graph, int window, double negative, Index h, Index d,
                       const NetmfOptions& options) {
  check_rank(d, graph.num_vertices(), "embedding dimension d");
  const EigenPairs pairs = select_eigenpairs(graph, h, window, options.ordering, options);
  ClosedFormMatrix m_hat = approximate_similarity(graph, pairs, window, negative, options.limits);
  Embedding e = factorize(shifted_log(m_hat), d, options.svd, options.keep_context);
  e.provenance.model = "netmf-approx";
  e.provenance.set("ordering", to_string(options.ordering));
  return e;
}

ErrorReport error_report(const DenseMatrix& m, const DenseMatrix& m_hat, const Vector& excluded,
                         int window, double negative, const Graph& graph, double tolerance) {
  if (m.rows() != m_hat.rows() || m.cols() != m_hat.cols())
    throw ValidationError("error report needs equal shapes, got " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + " and " +
                          std::to_string(m_hat.rows()) + "x" + std::to_string(m_hat.cols()));
  if (!(negative > 0.0)) throw ParameterError("negative-sample count b must be positive");
  ErrorReport r;
  r.tolerance = tolerance;
  r.similarity_error = (m - m_hat).norm();
  const DenseMatrix ms = shifted(m);
  const DenseMatrix hs = shifted(m_hat);
  r.shifted_error = (ms - hs).norm();
  r.log_error = (ms.array().log() - hs.array().log()).matrix().norm();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < excluded.size(); ++i) {
    const double f = window_filter(excluded[i], window);
    sum += f * f;
  }
  r.bound = graph.volume() / (negative * graph.min_degree()) * std::sqrt(sum);
  r.chain_holds = r.log_slack() >= -tolerance && r.shifted_slack() >= -tolerance;
  r.bound_holds = r.bound_slack() >= -tolerance;
  return r;
}

}  // namespace netmf
