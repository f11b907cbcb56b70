#include "netmf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "netmf/errors.hpp"
#include "netmf/parallel.hpp"

namespace netmf {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LogisticProblem {
  const DenseMatrix& x;  // m x (d + 1), last column ones
  const Vector& y;       // 0/1
  double lambda;

  double loss(const Vector& w) const {
    const Vector z = x * w;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) acc += softplus(z[i]) - y[i] * z[i];
    return acc + 0.5 * lambda * w.squaredNorm();
  }
};

// Damped Newton with Armijo backtracking. Returns the weights; throws
// ConvergenceError if the gradient norm stays above `tol`.
Vector fit_logistic(const LogisticProblem& prob, double tol, int max_iter, Index label) {
  const Eigen::Index dim = prob.x.cols();
  Vector w = Vector::Zero(dim);
  double f = prob.loss(w);
  double grad_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Vector z = prob.x * w;
    Vector s(z.size());
    Vector h(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      s[i] = sigmoid(z[i]);
      h[i] = s[i] * (1.0 - s[i]);
    }
    const Vector g = prob.x.transpose() * (s - prob.y) + prob.lambda * w;
    grad_norm = g.norm();
    if (grad_norm <= tol) return w;

    DenseMatrix hess = prob.x.transpose() * h.asDiagonal() * prob.x;
    hess.diagonal().array() += prob.lambda;
    Vector step;
    double damping = 0.0;
    const double scale = std::max(1.0, hess.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt) {
      DenseMatrix damped = hess;
      damped.diagonal().array() += damping;
      Eigen::LDLT<DenseMatrix> ldlt(damped);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = -ldlt.solve(g);
        if (step.allFinite() && g.dot(step) < 0.0) break;
      }
      step.resize(0);
      damping = damping == 0.0 ? 1e-12 * scale : damping * 10.0;
    }
    if (step.size() == 0) step = -g;

    const double slope = g.dot(step);
    double t = 1.0;
    double f_new = prob.loss(w + step);
    int backtracks = 0;
    while (!(f_new <= f + 1e-4 * t * slope) && backtracks < 60) {
      t *= 0.5;
      f_new = prob.loss(w + t * step);
      ++backtracks;
    }
    if (!(f_new <= f)) break;  // no further decrease representable
    w += t * step;
    f = f_new;
  }
  const Vector z = prob.x * w;
  Vector s(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) s[i] = sigmoid(z[i]);
  grad_norm = (prob.x.transpose() * (s - prob.y) + prob.lambda * w).norm();
  if (grad_norm <= tol) return w;
  throw ConvergenceError("logistic regression for label " + std::to_string(label) +
                             " stopped at gradient norm " + std::to_string(grad_norm),
                         {grad_norm});
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t a, std::size_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

Split split(const LabelSet& labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ParameterError("training ratio must lie in (0, 1), got " + std::to_string(ratio));
  std::vector<Index> vertices = labels.labeled_vertices();
  const auto count = static_cast<long>(vertices.size());
  const long train = std::lround(ratio * static_cast<double>(count));
  if (train < 1 || train >= count)
    throw ParameterError("training ratio " + std::to_string(ratio) + " over " +
                         std::to_string(count) + " labeled vertices leaves an empty " +
                         (train < 1 ? "training" : "test") + " set");
  std::mt19937_64 rng(seed);
  std::shuffle(vertices.begin(), vertices.end(), rng);
  Split out;
  out.train.assign(vertices.begin(), vertices.begin() + train);
  out.test.assign(vertices.begin() + train, vertices.end());
  return out;
}

OneVsRestModel train_one_vs_rest(const DenseMatrix& features, const LabelSet& labels,
                                 const std::vector<Index>& train, const EvalConfig& config) {
  if (config.regularization < 0.0) throw ParameterError("regularization must be nonnegative");
  const Index d = static_cast<Index>(features.cols());
  const Index num_labels = labels.num_labels();
  DenseMatrix x(static_cast<Index>(train.size()), d + 1);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Index v = train[i];
    if (v < 0 || v >= features.rows())
      throw ValidationError("no feature row for vertex " + std::to_string(v));
    x.row(static_cast<Index>(i)).head(d) = features.row(v);
    x(static_cast<Index>(i), d) = 1.0;
  }
  DenseMatrix y = DenseMatrix::Zero(static_cast<Index>(train.size()), num_labels);
  for (std::size_t i = 0; i < train.size(); ++i)
    for (Index l : labels.assignments[static_cast<std::size_t>(train[i])])
      y(static_cast<Index>(i), l) = 1.0;

  OneVsRestModel model;
  model.weights = DenseMatrix::Zero(d + 1, num_labels);
  model.trained.assign(static_cast<std::size_t>(num_labels), false);
  std::vector<char> fitted(static_cast<std::size_t>(num_labels), 0);
  for (Index l = 0; l < num_labels; ++l)
    fitted[static_cast<std::size_t>(l)] = y.col(l).sum() > 0.0 ? 1 : 0;

  parallel_for(static_cast<std::size_t>(num_labels), [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      if (!fitted[l]) continue;
      const Vector yl = y.col(static_cast<Index>(l));
      const LogisticProblem prob{x, yl, config.regularization};
      model.weights.col(static_cast<Index>(l)) =
          fit_logistic(prob, config.tolerance, config.max_iter, static_cast<Index>(l));
    }
  });
  for (Index l = 0; l < num_labels; ++l) {
    model.trained[static_cast<std::size_t>(l)] = fitted[static_cast<std::size_t>(l)] != 0;
    if (!fitted[static_cast<std::size_t>(l)])
      warn("label '" + labels.labels.token(l) + "' has no training example; skipped");
  }
  return model;
}

DenseMatrix decision_scores(const OneVsRestModel& model, const DenseMatrix& features,
                            const std::vector<Index>& vertices) {
  const Index d = static_cast<Index>(model.weights.rows()) - 1;
  if (features.cols() != d)
    throw ValidationError("feature width " + std::to_string(features.cols()) +
                          " does not match the model's " + std::to_string(d));
  DenseMatrix scores(static_cast<Index>(vertices.size()), model.num_labels());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Index v = vertices[i];
    if (v < 0 || v >= features.rows())
      throw ValidationError("no feature row for vertex " + std::to_string(v));
    for (Index l = 0; l < model.num_labels(); ++l) {
      scores(static_cast<Index>(i), l) =
          model.trained[static_cast<std::size_t>(l)]
              ? features.row(v).dot(model.weights.col(l).head(d)) + model.weights(d, l)
              : -std::numeric_limits<double>::infinity();
    }
  }
  return scores;
}

std::vector<std::vector<Index>> predict_topk(const OneVsRestModel& model,
                                             const DenseMatrix& features,
                                             const std::vector<Index>& vertices,
                                             const std::vector<Index>& k) {
  if (k.size() != vertices.size())
    throw ParameterError("need one label count per predicted vertex");
  const DenseMatrix scores = decision_scores(model, features, vertices);
  const Index num_labels = model.num_labels();
  std::vector<std::vector<Index>> out(vertices.size());
  bool clipped = false;
  std::vector<Index> order(static_cast<std::size_t>(num_labels));
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    Index want = k[i];
    if (want < 1) throw ParameterError("label count per vertex must be at least 1");
    if (want > num_labels) {
      want = num_labels;
      clipped = true;
    }
    std::iota(order.begin(), order.end(), 0);
    const auto row = static_cast<Index>(i);
    std::partial_sort(order.begin(), order.begin() + want, order.end(), [&](Index a, Index b) {
      const double sa = scores(row, a);
      const double sb = scores(row, b);
      return sa > sb || (sa == sb && a < b);
    });
    out[i].assign(order.begin(), order.begin() + want);
    std::sort(out[i].begin(), out[i].end());
  }
  if (clipped) warn("requested more labels than exist; predictions clipped");
  return out;
}

F1Scores f1_scores(const std::vector<std::vector<Index>>& predictions,
                   const std::vector<std::vector<Index>>& truth, Index num_labels) {
  if (predictions.size() != truth.size())
    throw ParameterError("predictions and truth cover different vertex counts");
  std::vector<long> tp(static_cast<std::size_t>(num_labels), 0);
  std::vector<long> fp(tp);
  std::vector<long> fn(tp);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = predictions[i];
    const auto& t = truth[i];
    for (Index l : p) {
      if (std::binary_search(t.begin(), t.end(), l)) {
        ++tp[static_cast<std::size_t>(l)];
      } else {
        ++fp[static_cast<std::size_t>(l)];
      }
    }
    for (Index l : t)
      if (!std::binary_search(p.begin(), p.end(), l)) ++fn[static_cast<std::size_t>(l)];
  }
  long stp = 0;
  long sfp = 0;
  long sfn = 0;
  double macro = 0.0;
  for (std::size_t l = 0; l < tp.size(); ++l) {
    stp += tp[l];
    sfp += fp[l];
    sfn += fn[l];
    const long denom = 2 * tp[l] + fp[l] + fn[l];
    if (denom > 0) macro += 2.0 * static_cast<double>(tp[l]) / static_cast<double>(denom);
  }
  F1Scores out;
  const long denom = 2 * stp + sfp + sfn;
  out.micro = denom > 0 ? 100.0 * 2.0 * static_cast<double>(stp) / static_cast<double>(denom) : 0.0;
  out.macro = num_labels > 0 ? 100.0 * macro / static_cast<double>(num_labels) : 0.0;
  return out;
}

EvalReport evaluate(const DenseMatrix& features, const LabelSet& labels, const EvalConfig& config) {
  if (config.repeats < 1) throw ParameterError("repeats must be at least 1");
  if (features.rows() < labels.num_vertices)
    throw ValidationError("embedding has " + std::to_string(features.rows()) +
                          " rows but labels reference " + std::to_string(labels.num_vertices) +
                          " vertices");
  EvalReport report;
  for (std::size_t ri = 0; ri < config.ratios.size(); ++ri) {
    RatioResult res;
    res.ratio = config.ratios[ri];
    for (int rep = 0; rep < config.repeats; ++rep) {
      const Split s = split(labels, res.ratio, derive_seed(config.seed, ri, static_cast<std::size_t>(rep)));
      const OneVsRestModel model = train_one_vs_rest(features, labels, s.train, config);
      std::vector<std::vector<Index>> truth;
      std::vector<Index> k;
      for (Index v : s.test) {
        truth.push_back(labels.assignments[static_cast<std::size_t>(v)]);
        k.push_back(static_cast<Index>(truth.back().size()));
      }
      const auto pred = predict_topk(model, features, s.test, k);
      const F1Scores f1 = f1_scores(pred, truth, labels.num_labels());
      res.micro.push_back(f1.micro);
      res.macro.push_back(f1.macro);
    }
    res.micro_mean = mean(res.micro);
    res.micro_std = sample_std(res.micro);
    res.macro_mean = mean(res.macro);
    res.macro_std = sample_std(res.macro);
    report.results.push_back(std::move(res));
  }
  return report;
}

}  // namespace netmf
