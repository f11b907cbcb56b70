#pragma once

#include <cstdint>
#include <vector>

#include "netmf/closed_form.hpp"
#include "netmf/graph.hpp"

namespace netmf {

// Eigenpairs of a symmetric matrix, eigenvalues in descending algebraic
// order, eigenvectors as orthonormal columns. Each eigenvector is signed so
// that its first nonzero component is positive.
struct EigenPairs {
  Vector values;
  DenseMatrix vectors;
  // ||S u_i - lambda_i u_i||_2 per pair.
  Vector residuals;

  Index count() const noexcept { return static_cast<Index>(values.size()); }
  // The pairs at the given positions, in that order.
  EigenPairs select(const std::vector<Index>& positions) const;
};

struct LanczosOptions {
  // Converged when every wanted Ritz residual is below tol.
  double tol = 1e-10;
  // Krylov dimension cap; 0 picks min(n, max(4h, h + 100)).
  Index max_iter = 0;
  // Thick restarts allowed once the basis reaches the cap.
  int max_restarts = 200;
  std::uint64_t seed = 42;
};

// The h algebraically largest eigenpairs of symmetric S by Lanczos with full
// reorthogonalization and thick restarts. Invariant-subspace breakdowns
// continue from a fresh vector orthogonal to the basis, so h = n recovers
// repeated eigenvalues.
// Throws ConvergenceError carrying the Ritz residual estimates.
EigenPairs top_eigenpairs(const SparseMatrix& s, Index h, const LanczosOptions& options = {});

// Full dense eigendecomposition (reference path for small matrices).
EigenPairs dense_eigenpairs(const DenseMatrix& symmetric);

// (1/T) sum_{r=1..T} x^r, evaluated in Horner form.
double window_filter(double x, int window);

// M_hat = vol(G)/b D^{-1/2} U_h f(Lambda_h) U_h^T D^{-1/2}. Entries may be
// negative.
ClosedFormMatrix approximate_similarity(const Graph& graph, const EigenPairs& pairs, int window,
                                        double negative, const DenseLimits& limits = {});

// Positions into `values` sorted by |f(lambda)| non-increasing (ties by
// position), i.e. the permutation p_1, p_2, ... used by the singular-value bound.
std::vector<Index> filter_magnitude_order(const Vector& values, int window);

struct SpectralReport {
  int window = 1;
  double min_degree = 0.0;
  double max_degree = 0.0;
  // Eigenvalues of S, descending.
  Vector eigenvalues;
  // f(lambda_i), same order as eigenvalues.
  Vector filtered;
  // Eigenvalues of B = (1/T sum P^r) D^{-1}, descending.
  Vector interior_eigenvalues;
  // sigma_s(B) and (1/d_min)|f(lambda_{p_s})|, both non-increasing.
  Vector singular_values;
  Vector singular_bounds;
  // lambda_min(B) and its Rayleigh-quotient lower bound.
  double interior_min = 0.0;
  double rayleigh_bound = 0.0;
  // min_s (bound_s - sigma_s) and interior_min - rayleigh_bound.
  double singular_slack = 0.0;
  double rayleigh_slack = 0.0;
  bool singular_ok = false;
  bool rayleigh_ok = false;
  bool passed() const noexcept { return singular_ok && rayleigh_ok; }
};

struct BoundOptions {
  double tolerance = 1e-10;
  Index max_vertices = 2000;
};

// Checks sigma_s(B) <= (1/d_min)|f(lambda_{p_s})| for all s and
// lambda_min(B) >= c * lambda_min(U f(Lambda) U^T), where c = 1/d_min when
// that minimum is <= 0 and 1/d_max otherwise. Dense; throws CapacityError
// above options.max_vertices.
SpectralReport verify_bounds(const Graph& graph, int window, const BoundOptions& options = {});

}  // namespace netmf
