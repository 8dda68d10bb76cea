#pragma once

#include "bos/tracks.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bos {

/// Emission model of one behavioural/affective state. Every channel is drawn
/// as mean + noise * scale * N(0, 1); AU45 additionally carries blink pulses.
struct LatentState {
  std::string name;
  ChannelRow mean = ChannelRow::Zero();
  ChannelRow scale = ChannelRow::Zero();
  double blink_probability = 0.0; // per-frame chance that a pulse starts
  double blink_amplitude = 2.5;
};

enum class LabelingMode {
  kFrequency, // label decided by how often each state occurs; runs shuffled
  kOrder,     // both labels share one state multiset, label decided by block order
};

using Recipe = std::vector<std::pair<std::string, double>>;

struct GeneratorConfig {
  LabelingMode mode = LabelingMode::kFrequency;
  int num_videos = 600;
  int frames_per_video = 2400;
  double fps = 24.0;
  int num_levels = 2;
  std::uint64_t seed = 7;
  int dwell_min = 150;
  int dwell_max = 600;
  double noise = 1.0;
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
  std::vector<LatentState> states;
  /// Frequency mode: one occupancy recipe per level. Order mode: a single
  /// recipe whose listed order is the block order of level 0; level 1 uses
  /// the reverse.
  std::vector<Recipe> level_recipes;

  const LatentState &state(const std::string &name) const;
  /// Throws InfeasibleRecipe naming the offending level.
  void validate() const;
};

/// focused, off-task, sleepy, fidgeting, facepalm.
std::vector<LatentState> default_states();

/// Two levels, each mixing two states. The per-state emissions are chosen so
/// whole-video means and standard deviations agree between the levels while
/// the segment-level states differ.
GeneratorConfig default_generator_config();
/// One state per video; whole-video summaries separate the levels.
GeneratorConfig single_state_generator_config();
/// Paired videos: same blocks, opposite order.
GeneratorConfig order_generator_config();

GeneratorConfig generator_config_from_json(const std::string &text);
std::string generator_config_to_json(const GeneratorConfig &config);

struct GeneratedVideo {
  FeatureTrack track;
  int label = 0;
  Split split = Split::kTrain;
  /// Latent state index (into GeneratorConfig::states) of every frame.
  std::vector<int> states;
};

struct GeneratedDataset {
  std::vector<GeneratedVideo> videos;
  int num_levels = 2;
};

GeneratedDataset generate_dataset(const GeneratorConfig &config);

/// Writes tracks/<video_id>.csv and manifest.json under `dir`. The manifest file
/// stores paths relative to `dir`; the returned one has them resolved.
DatasetManifest write_dataset(const std::filesystem::path &dir, const GeneratedDataset &dataset, double fps);

} // namespace bos
