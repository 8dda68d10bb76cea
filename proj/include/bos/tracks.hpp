#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bos {

/// Raw per-frame channels, in CSV column order.
enum Channel : int {
  kValence = 0,
  kArousal,
  kAu45,
  kGazeX,
  kGazeY,
  kHeadX,
  kHeadY,
  kHeadZ,
  kHeadPitch,
  kHeadYaw,
  kHeadRoll,
  kWristX,
  kWristY,
  kWristZ,
};

inline constexpr int kNumChannels = 14;

inline constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "valence", "arousal",    "au45",     "gaze_x",   "gaze_y",  "head_x",  "head_y",
    "head_z",  "head_pitch", "head_yaw", "head_roll", "wrist_x", "wrist_y", "wrist_z"};

using ChannelRow = Eigen::Matrix<double, 1, kNumChannels>;
/// One row per frame, one column per Channel.
using ChannelMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumChannels>;

struct FrameRecord {
  std::int64_t frame_index = 0;
  ChannelRow values = ChannelRow::Zero();
  bool valid = true;
};

/// Extracted channels of one video. Stored column-major so each channel is a
/// contiguous series.
struct FeatureTrack {
  std::string video_id;
  double fps = 30.0;
  std::vector<std::int64_t> frame_index;
  ChannelMatrix channels;
  std::vector<bool> valid;

  Eigen::Index size() const { return channels.rows(); }
  FrameRecord frame(Eigen::Index i) const;
  void push_back(const FrameRecord &record);
  bool all_valid() const;
};

/// Checks the channel range rules for one frame. Throws ValueOutOfRange naming
/// the column; `row` is only used for the report.
void check_frame_ranges(const ChannelRow &values, long row);

FeatureTrack parse_track(const std::filesystem::path &path, double fps);
FeatureTrack parse_track_csv(std::string_view text, std::string video_id, double fps);

/// Serializes with shortest round-trip decimals, so parse(write(t)) == t.
std::string format_track_csv(const FeatureTrack &track);
void write_track(const std::filesystem::path &path, const FeatureTrack &track);

inline constexpr double kDefaultMaxInvalidFraction = 0.5;

/// Fills detection failures so every frame is usable. Missing frame indices
/// are inserted as invalid frames first; invalid frames then take the channels
/// of the most recent valid frame (a leading invalid run takes the first valid
/// frame's values).
FeatureTrack repair_track(const FeatureTrack &track,
                          double max_invalid_fraction = kDefaultMaxInvalidFraction);

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct ManifestEntry {
  std::string video_id;
  std::string track_path;
  int label = 0;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  int num_levels = 2;
  double fps = 30.0;

  /// Labels in range, train and test splits non-empty.
  void validate() const;
  std::vector<ManifestEntry> select(Split split) const;
};

/// Track paths in the returned manifest are resolved against the manifest's
/// directory.
DatasetManifest read_manifest(const std::filesystem::path &path);
void write_manifest(const std::filesystem::path &path, const DatasetManifest &manifest);

} // namespace bos
