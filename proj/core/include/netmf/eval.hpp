#pragma once

#include <cstdint>
#include <vector>

#include "netmf/graph.hpp"

namespace netmf {

struct EvalConfig {
  std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int repeats = 10;
  std::uint64_t seed = 42;
  // L2 strength; the intercept is penalized too.
  double regularization = 1.0;
  // Newton stops once the gradient 2-norm is at most this.
  double tolerance = 1e-6;
  int max_iter = 200;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

// Shuffles the labeled vertices and takes the first round(ratio * count) for
// training. Throws ParameterError if either side would be empty.
Split split(const LabelSet& labels, double ratio, std::uint64_t seed);

struct OneVsRestModel {
  // Column l holds the weights of label l; the last row is the intercept.
  DenseMatrix weights;
  // Labels without a positive training example are not fitted.
  std::vector<bool> trained;
  Index num_labels() const noexcept { return static_cast<Index>(trained.size()); }
};

// Fits one L2-regularized logistic regression per label on the rows of
// `features` listed in `train`. Throws ConvergenceError carrying the achieved
// gradient norm when a fit does not reach the tolerance.
OneVsRestModel train_one_vs_rest(const DenseMatrix& features, const LabelSet& labels,
                                 const std::vector<Index>& train, const EvalConfig& config);

// Decision values x^T w + w_0 per (vertex, label); -inf for unfitted labels.
DenseMatrix decision_scores(const OneVsRestModel& model, const DenseMatrix& features,
                            const std::vector<Index>& vertices);

// The k[i] highest-scoring labels for vertices[i], ties to the lower label
// index, returned sorted ascending. k above the label count is clipped with
// a warning.
std::vector<std::vector<Index>> predict_topk(const OneVsRestModel& model,
                                             const DenseMatrix& features,
                                             const std::vector<Index>& vertices,
                                             const std::vector<Index>& k);

struct F1Scores {
  double micro = 0.0;  // percent
  double macro = 0.0;  // percent
};

// Both arguments hold sorted label sets per vertex, aligned by position.
// Macro averages over all `num_labels` labels; a label with no truth and no
// prediction scores 0.
F1Scores f1_scores(const std::vector<std::vector<Index>>& predictions,
                   const std::vector<std::vector<Index>>& truth, Index num_labels);

struct RatioResult {
  double ratio = 0.0;
  std::vector<double> micro;  // per repeat
  std::vector<double> macro;
  double micro_mean = 0.0;
  double micro_std = 0.0;
  double macro_mean = 0.0;
  double macro_std = 0.0;
};

struct EvalReport {
  std::vector<RatioResult> results;
};

// Row v of `features` is vertex v. Only labeled vertices take part.
EvalReport evaluate(const DenseMatrix& features, const LabelSet& labels, const EvalConfig& config);

}  // namespace netmf
