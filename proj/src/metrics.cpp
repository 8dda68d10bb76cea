#include "bos/metrics.hpp"

#include "bos/error.hpp"
#include "bos/log.hpp"

#include <string>

namespace bos {
namespace {

double ratio(int num, int den, const char *what) {
  if (den == 0) {
    warn(std::string(what) + " is 0/0; reporting 0");
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ConfusionMatrix confusion_matrix(const std::vector<int> &truth, const std::vector<int> &predicted, int num_levels) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(truth.size()) + " labels but " +
                                                std::to_string(predicted.size()) + " predictions");
  }
  if (truth.empty()) throw Error(ErrorCode::kLengthMismatch, "nothing to evaluate");
  if (num_levels < 2) throw Error(ErrorCode::kMalformedInput, "num_levels must be >= 2");
  ConfusionMatrix c = ConfusionMatrix::Zero(num_levels, num_levels);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || t >= num_levels || p < 0 || p >= num_levels) {
      throw Error(ErrorCode::kLabelOutOfRange, "label pair (" + std::to_string(t) + ", " + std::to_string(p) +
                                                   ") outside [0, " + std::to_string(num_levels - 1) + "]");
    }
    ++c(t, p);
  }
  return c;
}

Evaluation evaluate(const std::vector<int> &truth, const std::vector<int> &predicted, int num_levels) {
  Evaluation e;
  e.confusion = confusion_matrix(truth, predicted, num_levels);
  e.total = e.confusion.sum();
  e.accuracy = static_cast<double>(e.confusion.trace()) / static_cast<double>(e.total);
  if (num_levels == 2) {
    const int tp = e.confusion(1, 1);
    const int fp = e.confusion(0, 1);
    const int fn = e.confusion(1, 0);
    BinaryScores s;
    s.precision = ratio(tp, tp + fp, "precision");
    s.recall = ratio(tp, tp + fn, "recall");
    s.f1 = ratio(2 * tp, 2 * tp + fp + fn, "F1");
    e.binary = s;
  }
  return e;
}

} // namespace bos
