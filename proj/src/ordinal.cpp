#include "bos/ordinal.hpp"

#include "bos/error.hpp"
#include "bos/log.hpp"

#include <cmath>

namespace bos {
namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd &z) { return z.unaryExpr([](double v) { return sigmoid(v); }); }

double data_term(const Eigen::VectorXd &z, const Eigen::Ref<const Eigen::VectorXd> &y) {
  double f = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) f += softplus(z(i)) - y(i) * z(i);
  return f;
}

void check_training_inputs(const Eigen::Ref<const Eigen::MatrixXd> &x, const Eigen::Ref<const Eigen::VectorXd> &y,
                           double lambda) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.rows()) + " samples but " + std::to_string(y.size()) + " labels");
  }
  if (x.rows() < 2) throw Error(ErrorCode::kNotEnoughData, "binary classifier needs at least 2 samples");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kMalformedInput, "lambda must be >= 0");
  int positives = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw Error(ErrorCode::kLabelOutOfRange, "binary labels must be 0 or 1");
    positives += y(i) == 1.0;
  }
  if (positives == 0 || positives == y.size()) {
    throw Error(ErrorCode::kSingleClassTraining, "training labels contain a single class");
  }
}

struct GlmFit {
  Eigen::VectorXd theta;
  double bias = 0.0;
  FitReport report;
};

// Gradient descent with Armijo backtracking. The step doubles after every
// accepted move and halves on every rejected trial.
GlmFit fit_glm(const Eigen::Ref<const Eigen::MatrixXd> &design, const Eigen::Ref<const Eigen::MatrixXd> &reg,
               const Eigen::Ref<const Eigen::VectorXd> &y, double lambda, const OptimizerOptions &options) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-30;
  constexpr int kRefreshEvery = 64;

  const Eigen::Index p = design.cols();
  GlmFit fit;
  fit.theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(design.rows());
  Eigen::VectorXd reg_theta = Eigen::VectorXd::Zero(p);
  double step = 1.0;

  int it = 0;
  for (;; ++it) {
    if (it % kRefreshEvery == 0 && it > 0) {
      // Incremental updates drift; resynchronize.
      z = (design * fit.theta).array() + fit.bias;
      reg_theta = reg * fit.theta;
    }
    const Eigen::VectorXd residual = sigmoid(z) - y;
    const double f = data_term(z, y) + 0.5 * lambda * fit.theta.dot(reg_theta);
    const Eigen::VectorXd g_theta = design.transpose() * residual + lambda * reg_theta;
    const double g_bias = residual.sum();
    const double g2 = g_theta.squaredNorm() + g_bias * g_bias;
    fit.report.objective = f;
    fit.report.grad_norm = std::sqrt(g2);
    if (fit.report.grad_norm <= options.grad_tol || it >= options.max_iter) break;

    const Eigen::VectorXd dz = (design * g_theta).array() + g_bias;
    const Eigen::VectorXd d_reg = reg * g_theta;
    const double theta_reg_theta = fit.theta.dot(reg_theta);
    const double cross = g_theta.dot(reg_theta);
    const double g_reg_g = g_theta.dot(d_reg);

    double t = step;
    bool accepted = false;
    while (t >= kMinStep) {
      const Eigen::VectorXd z_trial = z - t * dz;
      const double f_trial =
          data_term(z_trial, y) + 0.5 * lambda * (theta_reg_theta - 2.0 * t * cross + t * t * g_reg_g);
      if (f_trial <= f - kArmijo * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    fit.theta -= t * g_theta;
    fit.bias -= t * g_bias;
    z -= t * dz;
    reg_theta -= t * d_reg;
    step = 2.0 * t;
  }
  fit.report.iterations = it;
  return fit;
}

} // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
  case Backend::kLinear: return "linear";
  case Backend::kRbf: return "rbf";
  }
  return "rbf";
}

Backend parse_backend(std::string_view text) {
  if (text == "linear") return Backend::kLinear;
  if (text == "rbf") return Backend::kRbf;
  throw Error(ErrorCode::kMalformedInput, "unknown backend '" + std::string(text) + "'");
}

LossAndGradient logistic_loss(const Eigen::Ref<const Eigen::MatrixXd> &design,
                              const Eigen::Ref<const Eigen::MatrixXd> &regularizer,
                              const Eigen::Ref<const Eigen::VectorXd> &y, double lambda,
                              const Eigen::Ref<const Eigen::VectorXd> &params) {
  const Eigen::Index p = design.cols();
  if (params.size() != p + 1) throw Error(ErrorCode::kDimensionMismatch, "params must hold weights and bias");
  const auto theta = params.head(p);
  const double bias = params(p);
  const Eigen::VectorXd z = (design * theta).array() + bias;
  const Eigen::VectorXd reg_theta = regularizer * theta;
  const Eigen::VectorXd residual = sigmoid(z) - y;

  LossAndGradient out;
  out.value = data_term(z, y) + 0.5 * lambda * theta.dot(reg_theta);
  out.gradient.resize(p + 1);
  out.gradient.head(p) = design.transpose() * residual + lambda * reg_theta;
  out.gradient(p) = residual.sum();
  return out;
}

Eigen::MatrixXd rbf_gram(const Eigen::Ref<const Eigen::MatrixXd> &a, const Eigen::Ref<const Eigen::MatrixXd> &b,
                         double gamma) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::kDimensionMismatch, "kernel inputs differ in width");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
  }
  return k;
}

Eigen::VectorXd BinaryClassifier::predict_proba(const Eigen::Ref<const Eigen::MatrixXd> &x) const {
  return std::visit(
      [&x](const auto &m) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearLogistic>) {
          if (x.cols() != m.weights.size()) throw Error(ErrorCode::kDimensionMismatch, "input width mismatch");
          return sigmoid(Eigen::VectorXd((x * m.weights).array() + m.bias));
        } else if constexpr (std::is_same_v<T, KernelLogistic>) {
          if (x.cols() != m.support.cols()) throw Error(ErrorCode::kDimensionMismatch, "input width mismatch");
          return sigmoid(Eigen::VectorXd((rbf_gram(x, m.support, m.gamma) * m.dual).array() + m.bias));
        } else {
          return Eigen::VectorXd::Constant(x.rows(), m.p);
        }
      },
      model_);
}

double BinaryClassifier::predict_proba_one(const Eigen::Ref<const Eigen::RowVectorXd> &x) const {
  return predict_proba(Eigen::MatrixXd(x))(0);
}

BinaryClassifier fit_logistic(const Eigen::Ref<const Eigen::MatrixXd> &x, const Eigen::Ref<const Eigen::VectorXd> &y,
                              double lambda, std::uint64_t /*seed*/, const OptimizerOptions &options) {
  check_training_inputs(x, y, lambda);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(x.cols(), x.cols());
  auto fit = fit_glm(x, identity, y, lambda, options);
  return BinaryClassifier(LinearLogistic{std::move(fit.theta), fit.bias}, fit.report);
}

BinaryClassifier fit_rbf_logistic(const Eigen::Ref<const Eigen::MatrixXd> &x,
                                  const Eigen::Ref<const Eigen::VectorXd> &y, double lambda, double gamma,
                                  std::uint64_t /*seed*/, const OptimizerOptions &options) {
  check_training_inputs(x, y, lambda);
  if (!(gamma > 0.0)) throw Error(ErrorCode::kMalformedInput, "gamma must be > 0");
  const Eigen::MatrixXd gram = rbf_gram(x, x, gamma);
  auto fit = fit_glm(gram, gram, y, lambda, options);
  return BinaryClassifier(KernelLogistic{Eigen::MatrixXd(x), std::move(fit.theta), fit.bias, gamma}, fit.report);
}

Eigen::VectorXd binarize_labels(const std::vector<int> &labels, int num_levels, int threshold_index) {
  if (threshold_index < 0 || threshold_index > num_levels - 2) {
    throw Error(ErrorCode::kIndexOutOfRange, "threshold index " + std::to_string(threshold_index) +
                                                 " outside [0, " + std::to_string(num_levels - 2) + "]");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] < 0 || labels[s] >= num_levels) {
      throw Error(ErrorCode::kLabelOutOfRange, "label " + std::to_string(labels[s]) + " out of range");
    }
    out(static_cast<Eigen::Index>(s)) = labels[s] <= threshold_index ? 1.0 : 0.0;
  }
  return out;
}

OrdinalPrediction combine_probabilities(const Eigen::Ref<const Eigen::VectorXd> &p_greater) {
  const Eigen::Index m = p_greater.size();
  if (m < 1) throw Error(ErrorCode::kInvalidProbability, "need at least one binary probability");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(p_greater(i) >= 0.0 && p_greater(i) <= 1.0)) {
      throw Error(ErrorCode::kInvalidProbability, "P(y > " + std::to_string(i) + ") = " +
                                                      std::to_string(p_greater(i)) + " not in [0, 1]");
    }
  }
  OrdinalPrediction out;
  Eigen::VectorXd &p = out.probabilities;
  p.resize(m + 1);
  p(0) = 1.0 - p_greater(0);
  for (Eigen::Index k = 1; k < m; ++k) p(k) = p_greater(k - 1) - p_greater(k);
  p(m) = p_greater(m - 1);
  if ((p.array() < 0.0).any()) {
    p = p.cwiseMax(0.0);
    p /= p.sum();
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k <= m; ++k) {
    if (p(k) > p(best)) best = k;
  }
  out.level = static_cast<int>(best);
  return out;
}

OrdinalModel train_ordinal(const Eigen::Ref<const Eigen::MatrixXd> &x, const std::vector<int> &labels,
                           int num_levels, Backend backend, const Hyperparams &hyperparams, std::uint64_t seed,
                           const OptimizerOptions &options) {
  if (num_levels < 2) throw Error(ErrorCode::kMalformedInput, "num_levels must be >= 2");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.rows()) + " samples but " + std::to_string(labels.size()) + " labels");
  }
  OrdinalModel model;
  model.num_levels = num_levels;
  model.input_dim = x.cols();
  model.backend = backend;
  model.hyperparams = hyperparams;
  model.seed = seed;
  for (int i = 0; i + 1 < num_levels; ++i) {
    const Eigen::VectorXd y = binarize_labels(labels, num_levels, i);
    const double prior = y.size() > 0 ? y.mean() : 0.5;
    if (y.size() == 0 || prior == 0.0 || prior == 1.0) {
      warn("binary problem y <= " + std::to_string(i) + " has a single class in training; using constant P = " +
           std::to_string(prior));
      model.classifiers.emplace_back(ConstantProbability{prior});
      continue;
    }
    if (backend == Backend::kLinear) {
      model.classifiers.push_back(fit_logistic(x, y, hyperparams.lambda, seed, options));
    } else {
      model.classifiers.push_back(fit_rbf_logistic(x, y, hyperparams.lambda, hyperparams.gamma, seed, options));
    }
  }
  return model;
}

OrdinalPrediction predict(const OrdinalModel &model, const Eigen::Ref<const Eigen::RowVectorXd> &x) {
  if (x.size() != model.input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "input has " + std::to_string(x.size()) + " bins, model expects " +
                                                   std::to_string(model.input_dim));
  }
  if (static_cast<int>(model.classifiers.size()) != model.num_levels - 1) {
    throw Error(ErrorCode::kMalformedInput, "model must hold num_levels - 1 classifiers");
  }
  Eigen::VectorXd p_greater(model.num_levels - 1);
  for (int i = 0; i + 1 < model.num_levels; ++i) {
    p_greater(i) = 1.0 - model.classifiers[static_cast<std::size_t>(i)].predict_proba_one(x);
  }
  if (model.num_levels == 2) {
    OrdinalPrediction out;
    out.probabilities.resize(2);
    out.probabilities << 1.0 - p_greater(0), p_greater(0);
    out.level = out.probabilities(1) > out.probabilities(0) ? 1 : 0;
    return out;
  }
  return combine_probabilities(p_greater);
}

} // namespace bos
