#include "bos/baselines.hpp"

#include "bos/error.hpp"

namespace bos {

SegmentFeatures functional_features(const FeatureTrack &track, double blink_threshold) {
  if (track.size() < 3) {
    throw Error(ErrorCode::kTrackTooShort, "track " + track.video_id + " needs >= 3 frames for functionals");
  }
  return compute_segment_features(track.channels, blink_threshold);
}

BaselineModel train_baseline(const Eigen::Ref<const Eigen::MatrixXd> &x, const std::vector<int> &labels,
                             int num_levels, Backend backend, const Hyperparams &hyperparams, std::uint64_t seed,
                             const OptimizerOptions &options) {
  BaselineModel out;
  out.standardizer = fit_standardizer(x);
  out.model = train_ordinal(out.standardizer.apply(x), labels, num_levels, backend, hyperparams, seed, options);
  return out;
}

OrdinalPrediction predict(const BaselineModel &model, const Eigen::Ref<const Eigen::RowVectorXd> &functional) {
  if (functional.size() != model.standardizer.dims()) {
    throw Error(ErrorCode::kDimensionMismatch, "functional vector width mismatch");
  }
  const Eigen::MatrixXd z = model.standardizer.apply(Eigen::MatrixXd(functional));
  return predict(model.model, z.row(0));
}

} // namespace bos
