#pragma once

#include <cstdint>
#include <optional>

#include "netmf/closed_form.hpp"
#include "netmf/graph.hpp"
#include "netmf/spectral.hpp"

namespace netmf {

// Elementwise ln(max(x, 1)) of a similarity-kind matrix.
ClosedFormMatrix shifted_log(const ClosedFormMatrix& similarity);

// max(x, 1), without the log.
DenseMatrix shifted(const DenseMatrix& values);

struct SvdOptions {
  // Full (divide-and-conquer) SVD when min(rows, cols) is at most this.
  Index full_threshold = 3000;
  // Randomized range finder settings for larger inputs.
  int oversampling = 10;
  int power_iterations = 7;
  std::uint64_t seed = 42;
};

struct SvdResult {
  DenseMatrix u;  // rows x d
  Vector singular_values;  // descending
  DenseMatrix v;  // cols x d
  // sqrt(sum_{i>d} sigma_i^2); from the full spectrum on the exact path and
  // from ||A||_F^2 - sum_{i<=d} sigma_i^2 on the randomized one.
  double discarded_norm = 0.0;
  bool randomized = false;
};

// Top-d singular triplets. The largest-magnitude entry of each left singular
// vector is made positive (ties: first such entry) and V follows the flip.
SvdResult truncated_svd(const DenseMatrix& a, Index d, const SvdOptions& options = {});

// Which eigenpairs the spectral approximation keeps.
enum class EigenOrdering {
  kAlgebraic,        // h algebraically largest (Lanczos)
  kFilterMagnitude,  // h largest |f(lambda)| (needs a dense eigendecomposition)
};

const char* to_string(EigenOrdering ordering) noexcept;

struct Embedding {
  DenseMatrix vectors;     // n x d, U_d sqrt(Sigma_d)
  Vector singular_values;  // Sigma_d
  std::optional<DenseMatrix> context;  // V_d sqrt(Sigma_d) when requested
  Provenance provenance;

  Index num_vertices() const noexcept { return static_cast<Index>(vectors.rows()); }
  Index dim() const noexcept { return static_cast<Index>(vectors.cols()); }
};

struct NetmfOptions {
  DenseLimits limits;
  SvdOptions svd;
  LanczosOptions lanczos;
  EigenOrdering ordering = EigenOrdering::kAlgebraic;
  bool keep_context = false;
};

// U_d sqrt(Sigma_d) of a log-shifted matrix.
Embedding factorize(const ClosedFormMatrix& log_shifted, Index d, const SvdOptions& svd = {},
                    bool keep_context = false);

// Small-window pipeline on the exact DeepWalk matrix.
Embedding netmf_exact(const Graph& graph, int window, double negative, Index d,
                      const NetmfOptions& options = {});

// Eigenpairs of the normalized adjacency chosen per `ordering`.
EigenPairs select_eigenpairs(const Graph& graph, Index h, int window, EigenOrdering ordering,
                             const NetmfOptions& options = {});

// Large-window pipeline on the rank-h spectral approximation.
Embedding netmf_approx(const Graph& graph, int window, double negative, Index h, Index d,
                       const NetmfOptions& options = {});

struct ErrorReport {
  double similarity_error = 0.0;  // ||M - M_hat||_F
  double shifted_error = 0.0;     // ||M' - M_hat'||_F
  double log_error = 0.0;         // ||log M' - log M_hat'||_F
  double bound = 0.0;             // vol/(b d_min) sqrt(sum_excluded f(lambda)^2)
  double tolerance = 1e-10;
  bool chain_holds = false;       // log_error <= shifted_error <= similarity_error
  bool bound_holds = false;       // similarity_error <= bound

  double log_slack() const noexcept { return shifted_error - log_error; }
  double shifted_slack() const noexcept { return similarity_error - shifted_error; }
  double bound_slack() const noexcept { return bound - similarity_error; }
};

// `excluded` holds the eigenvalues of the normalized adjacency that M_hat
// left out. Throws ValidationError when M and M_hat differ in shape.
ErrorReport error_report(const DenseMatrix& m, const DenseMatrix& m_hat, const Vector& excluded,
                         int window, double negative, const Graph& graph,
                         double tolerance = 1e-10);

}  // namespace netmf
