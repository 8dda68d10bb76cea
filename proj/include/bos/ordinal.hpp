#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bos {

enum class Backend { kLinear, kRbf };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

struct Hyperparams {
  double lambda = 1.0; // L2 strength; 1/C of the equivalent SVM
  double gamma = 0.01; // RBF width, unused by the linear backend
};

struct OptimizerOptions {
  double grad_tol = 1e-8;
  int max_iter = 10000;
};

/// Value and gradient of the L2-regularized logistic negative log-likelihood
///   sum_i softplus(z_i) - y_i z_i + lambda/2 * theta' R theta,  z = D theta + b
/// where (D, R) is (X, I) for the linear model and (K, K) for kernel logistic
/// regression on Gram matrix K. The bias is unregularized. `params` holds
/// theta followed by b; the returned gradient has the same layout.
struct LossAndGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

LossAndGradient logistic_loss(const Eigen::Ref<const Eigen::MatrixXd> &design,
                              const Eigen::Ref<const Eigen::MatrixXd> &regularizer,
                              const Eigen::Ref<const Eigen::VectorXd> &y, double lambda,
                              const Eigen::Ref<const Eigen::VectorXd> &params);

/// exp(-gamma * ||a_i - b_j||^2) for rows a_i of `a` and b_j of `b`.
Eigen::MatrixXd rbf_gram(const Eigen::Ref<const Eigen::MatrixXd> &a, const Eigen::Ref<const Eigen::MatrixXd> &b,
                         double gamma);

struct LinearLogistic {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

struct KernelLogistic {
  Eigen::MatrixXd support; // training inputs, one per row
  Eigen::VectorXd dual;
  double bias = 0.0;
  double gamma = 0.01;
};

/// Stand-in for a binary problem whose training labels contain one class.
struct ConstantProbability {
  double p = 0.5;
};

struct FitReport {
  int iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;
};

/// A probabilistic binary classifier; predict_proba returns P(y = 1).
class BinaryClassifier {
public:
  using Model = std::variant<LinearLogistic, KernelLogistic, ConstantProbability>;

  BinaryClassifier() = default;
  explicit BinaryClassifier(Model model, FitReport report = {})
      : model_(std::move(model)), report_(report) {}

  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd> &x) const;
  double predict_proba_one(const Eigen::Ref<const Eigen::RowVectorXd> &x) const;

  const Model &model() const { return model_; }
  const FitReport &report() const { return report_; }

private:
  Model model_ = ConstantProbability{};
  FitReport report_;
};

BinaryClassifier fit_logistic(const Eigen::Ref<const Eigen::MatrixXd> &x, const Eigen::Ref<const Eigen::VectorXd> &y,
                              double lambda, std::uint64_t seed, const OptimizerOptions &options = {});

BinaryClassifier fit_rbf_logistic(const Eigen::Ref<const Eigen::MatrixXd> &x,
                                  const Eigen::Ref<const Eigen::VectorXd> &y, double lambda, double gamma,
                                  std::uint64_t seed, const OptimizerOptions &options = {});

/// output[s] = 1 iff labels[s] <= threshold_index.
Eigen::VectorXd binarize_labels(const std::vector<int> &labels, int num_levels, int threshold_index);

struct OrdinalPrediction {
  Eigen::VectorXd probabilities;
  int level = 0;
};

/// Combines P(y > i), i = 0..L-2, into a distribution over L levels. Negative
/// differences (non-monotone inputs) are clamped to zero and the vector is
/// renormalized. The predicted level is the argmax, lowest index on ties.
OrdinalPrediction combine_probabilities(const Eigen::Ref<const Eigen::VectorXd> &p_greater);

struct OrdinalModel {
  int num_levels = 2;
  Eigen::Index input_dim = 0;
  Backend backend = Backend::kRbf;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  /// classifiers[i] estimates P(y <= i). A binary model holds one.
  std::vector<BinaryClassifier> classifiers;
};

OrdinalModel train_ordinal(const Eigen::Ref<const Eigen::MatrixXd> &x, const std::vector<int> &labels,
                           int num_levels, Backend backend, const Hyperparams &hyperparams, std::uint64_t seed,
                           const OptimizerOptions &options = {});

OrdinalPrediction predict(const OrdinalModel &model, const Eigen::Ref<const Eigen::RowVectorXd> &x);

} // namespace bos
