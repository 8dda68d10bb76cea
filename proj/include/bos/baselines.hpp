#pragma once

#include "bos/codebook.hpp"
#include "bos/ordinal.hpp"
#include "bos/segfeat.hpp"

#include <vector>

namespace bos {

/// The 49 segment statistics computed over the whole track at once.
SegmentFeatures functional_features(const FeatureTrack &track, double blink_threshold = kDefaultBlinkThreshold);

struct BaselineModel {
  Standardizer standardizer; // fitted on training functionals
  OrdinalModel model;
};

/// Z-scores the functional vectors with statistics of `x` and trains the
/// ordinal classifier on them.
BaselineModel train_baseline(const Eigen::Ref<const Eigen::MatrixXd> &x, const std::vector<int> &labels,
                             int num_levels, Backend backend, const Hyperparams &hyperparams, std::uint64_t seed,
                             const OptimizerOptions &options = {});

OrdinalPrediction predict(const BaselineModel &model, const Eigen::Ref<const Eigen::RowVectorXd> &functional);

} // namespace bos
