#include "bos/segfeat.hpp"

#include <charconv>

namespace bos {

const std::array<std::string, kSegmentDims> &segment_feature_names() {
  static const auto names = [] {
    std::array<std::string, kSegmentDims> out;
    out[0] = "valence_mean";
    out[1] = "valence_std";
    out[2] = "arousal_mean";
    out[3] = "arousal_std";
    out[4] = "blink_rate";
    std::size_t k = 5;
    for (const Channel c : kDynamicChannels) {
      const std::string base(kChannelNames[static_cast<std::size_t>(c)]);
      for (const char *stat : {"_vel_mean", "_vel_std", "_acc_mean", "_acc_std"}) out[k++] = base + stat;
    }
    return out;
  }();
  return names;
}

double blink_rate(const Eigen::Ref<const Eigen::VectorXd> &au45, double threshold) {
  const Eigen::Index n = au45.size();
  if (n == 0) return 0.0;
  int peaks = 0;
  bool counted_in_run = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(au45(i) > threshold)) {
      counted_in_run = false;
      continue;
    }
    if (counted_in_run || i == 0 || i == n - 1) continue;
    if (au45(i) >= au45(i - 1) && au45(i) >= au45(i + 1)) {
      ++peaks;
      counted_in_run = true;
    }
  }
  return static_cast<double>(peaks) / static_cast<double>(n);
}

std::vector<FrameSlice> segment_track(const FeatureTrack &track, const SegmentationConfig &cfg) {
  if (cfg.segment_len < 3) {
    throw Error(ErrorCode::kSegmentTooShort, "segment_len must be >= 3, got " + std::to_string(cfg.segment_len));
  }
  if (!track.all_valid()) {
    throw Error(ErrorCode::kMalformedInput, "track " + track.video_id + " has invalid frames; repair it first");
  }
  const Eigen::Index n = track.size();
  if (n < cfg.segment_len) {
    throw Error(ErrorCode::kTrackTooShort, "track " + track.video_id + " has " + std::to_string(n) +
                                               " frames, segment_len is " + std::to_string(cfg.segment_len));
  }
  const Eigen::Index count = n / cfg.segment_len;
  std::vector<FrameSlice> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index s = 0; s < count; ++s) {
    out.emplace_back(track.channels.middleRows(s * cfg.segment_len, cfg.segment_len));
  }
  return out;
}

SegmentFeatures compute_segment_features(const FrameSlice &slice, double blink_threshold) {
  if (slice.rows() < 3) {
    throw Error(ErrorCode::kSegmentTooShort, "segment needs >= 3 frames, got " + std::to_string(slice.rows()));
  }
  SegmentFeatures f;
  f(0) = population_mean(slice.col(kValence));
  f(1) = population_std(slice.col(kValence));
  f(2) = population_mean(slice.col(kArousal));
  f(3) = population_std(slice.col(kArousal));
  f(4) = blink_rate(slice.col(kAu45), blink_threshold);
  Eigen::Index k = 5;
  for (const Channel c : kDynamicChannels) {
    const Eigen::VectorXd velocity = diff_series(slice.col(c));
    const Eigen::VectorXd acceleration = diff_series(velocity);
    f(k++) = population_mean(velocity);
    f(k++) = population_std(velocity);
    f(k++) = population_mean(acceleration);
    f(k++) = population_std(acceleration);
  }
  return f;
}

FeatureMatrix extract_segment_features(const FeatureTrack &track, const SegmentationConfig &cfg,
                                       double blink_threshold) {
  const auto slices = segment_track(track, cfg);
  FeatureMatrix out(static_cast<Eigen::Index>(slices.size()), kSegmentDims);
  for (std::size_t s = 0; s < slices.size(); ++s) {
    out.row(static_cast<Eigen::Index>(s)) = compute_segment_features(slices[s], blink_threshold).transpose();
  }
  return out;
}

std::string format_segment_features_csv(const std::vector<std::string> &video_ids,
                                        const std::vector<FeatureMatrix> &features) {
  if (video_ids.size() != features.size()) {
    throw Error(ErrorCode::kLengthMismatch, "video id and feature lists differ in length");
  }
  std::string out = "video_id,segment_index";
  for (const auto &name : segment_feature_names()) out += "," + name;
  out += '\n';
  char buf[32];
  for (std::size_t v = 0; v < video_ids.size(); ++v) {
    for (Eigen::Index s = 0; s < features[v].rows(); ++s) {
      out += video_ids[v] + "," + std::to_string(s);
      for (Eigen::Index d = 0; d < features[v].cols(); ++d) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), features[v](s, d));
        out += ',';
        out.append(buf, ptr);
      }
      out += '\n';
    }
  }
  return out;
}

} // namespace bos
