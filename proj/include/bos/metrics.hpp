#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace bos {

/// Rows are true levels, columns predicted levels.
using ConfusionMatrix = Eigen::MatrixXi;

struct BinaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Evaluation {
  double accuracy = 0.0;
  /// Present for two-level problems; the positive class is level 1 ("engaged").
  std::optional<BinaryScores> binary;
  ConfusionMatrix confusion;
  int total = 0;
};

ConfusionMatrix confusion_matrix(const std::vector<int> &truth, const std::vector<int> &predicted, int num_levels);

/// Undefined ratios (0/0) are reported as 0 with a warning.
Evaluation evaluate(const std::vector<int> &truth, const std::vector<int> &predicted, int num_levels);

} // namespace bos
