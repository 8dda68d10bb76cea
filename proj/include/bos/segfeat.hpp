#pragma once

#include "bos/error.hpp"
#include "bos/tracks.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace bos {

inline constexpr int kSegmentDims = 49;
inline constexpr double kDefaultBlinkThreshold = 0.5;
inline constexpr int kDefaultSegmentLen = 200;

/// Layout:
///   [0..3]   valence mean, valence std, arousal mean, arousal std
///   [4]      blink rate
///   [5..48]  for each of gaze_x, gaze_y, head_x, head_y, head_z, head_pitch,
///            head_yaw, head_roll, wrist_x, wrist_y, wrist_z:
///            velocity mean, velocity std, acceleration mean, acceleration std
using SegmentFeatures = Eigen::Matrix<double, kSegmentDims, 1>;

/// One row per segment.
using FeatureMatrix = Eigen::MatrixXd;

/// Channels whose dynamics enter the feature vector, in layout order.
inline constexpr std::array<Channel, 11> kDynamicChannels = {
    kGazeX, kGazeY, kHeadX, kHeadY, kHeadZ, kHeadPitch, kHeadYaw, kHeadRoll, kWristX, kWristY, kWristZ};

/// Column names for the 49 slots, in layout order.
const std::array<std::string, kSegmentDims> &segment_feature_names();

struct SegmentationConfig {
  int segment_len = kDefaultSegmentLen;
};

using FrameSlice = Eigen::Ref<const ChannelMatrix>;

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
diff_series(const Eigen::MatrixBase<Derived> &x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw Error(ErrorCode::kSeriesTooShort, "difference needs at least 2 samples");
  return x.tail(n - 1) - x.head(n - 1);
}

template <typename Derived> typename Derived::Scalar population_mean(const Eigen::MatrixBase<Derived> &x) {
  return x.mean();
}

/// Standard deviation with denominator n.
template <typename Derived> typename Derived::Scalar population_std(const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  const Scalar mu = x.mean();
  return std::sqrt((x.array() - mu).square().mean());
}

/// Peaks per frame. A peak is an interior frame above `threshold` that is >=
/// both neighbours; each maximal above-threshold run contributes at most one.
double blink_rate(const Eigen::Ref<const Eigen::VectorXd> &au45, double threshold);

/// Fixed-length, non-overlapping windows in temporal order; the trailing
/// partial window is dropped.
std::vector<FrameSlice> segment_track(const FeatureTrack &track, const SegmentationConfig &cfg);

SegmentFeatures compute_segment_features(const FrameSlice &slice,
                                         double blink_threshold = kDefaultBlinkThreshold);

/// All segment feature vectors of a (fully valid) track, one row each.
FeatureMatrix extract_segment_features(const FeatureTrack &track, const SegmentationConfig &cfg,
                                       double blink_threshold = kDefaultBlinkThreshold);

/// Debug dump: video_id, segment_index, then the 49 named columns.
std::string format_segment_features_csv(const std::vector<std::string> &video_ids,
                                        const std::vector<FeatureMatrix> &features);

} // namespace bos
