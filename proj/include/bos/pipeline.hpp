#pragma once

#include "bos/baselines.hpp"
#include "bos/codebook.hpp"
#include "bos/metrics.hpp"
#include "bos/ordinal.hpp"
#include "bos/synthetic.hpp"
#include "bos/tracks.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bos {

struct LabeledTrack {
  FeatureTrack track;
  int label = 0;
  Split split = Split::kTrain;
};

struct LabeledDataset {
  std::vector<LabeledTrack> videos;
  int num_levels = 2;
};

/// Parses and repairs every track named by the manifest.
LabeledDataset load_dataset(const DatasetManifest &manifest,
                            double max_invalid_fraction = kDefaultMaxInvalidFraction);
LabeledDataset to_labeled(GeneratedDataset generated);

struct PipelineConfig {
  int segment_len = kDefaultSegmentLen;
  int codebook_size = kDefaultCodebookSize;
  double blink_threshold = kDefaultBlinkThreshold;
  bool normalize = false;
  Backend backend = Backend::kRbf;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  LloydOptions lloyd;
  OptimizerOptions optimizer;

  /// Seeds handed to k-means++ and to the classifiers, derived from `seed`.
  std::uint64_t codebook_seed() const;
  std::uint64_t model_seed() const;
};

struct VideoSegments {
  std::string video_id;
  int label = 0;
  Split split = Split::kTrain;
  FeatureMatrix segments;
};

std::vector<VideoSegments> extract_all(const LabeledDataset &data, int segment_len, double blink_threshold);

/// Stacks the training split's segments and fits the codebook on them.
Codebook fit_codebook(const std::vector<VideoSegments> &videos, const PipelineConfig &cfg);

struct EncodedSplit {
  std::vector<std::string> video_ids;
  Eigen::MatrixXd x; // one histogram per row
  std::vector<int> labels;
};

EncodedSplit encode_split(const Codebook &codebook, const std::vector<VideoSegments> &videos, Split split,
                          bool normalize);

struct SplitPredictions {
  std::vector<OrdinalPrediction> predictions;
  Evaluation evaluation;
};

SplitPredictions evaluate_split(const OrdinalModel &model, const EncodedSplit &data, int num_levels);

struct BosRun {
  Codebook codebook;
  OrdinalModel model;
  std::optional<Evaluation> validation;
  Evaluation test;
};

/// Codebook and classifier fitted on train; scored on validation and test.
BosRun run_bos(const LabeledDataset &data, const PipelineConfig &cfg);

/// Whole-track functionals per video.
EncodedSplit functional_split(const LabeledDataset &data, Split split, double blink_threshold);

struct BaselineRun {
  BaselineModel model;
  std::optional<Evaluation> validation;
  Evaluation test;
};

BaselineRun run_functional_baseline(const LabeledDataset &data, const PipelineConfig &cfg);

struct SweepGrid {
  std::vector<int> segment_lens;
  std::vector<int> codebook_sizes;
  std::vector<Backend> backends;

  std::size_t size() const { return segment_lens.size() * codebook_sizes.size() * backends.size(); }
};

struct SweepRow {
  std::size_t index = 0;
  int segment_len = 0;
  int codebook_size = 0;
  Backend backend = Backend::kRbf;
  bool ok = false;
  std::string error;
  std::optional<Evaluation> validation;
  std::optional<Evaluation> test;
  bool selected = false;
};

/// One row per grid cell in grid order (segment_len outermost, backend
/// innermost), whatever order the workers finish in. A failing cell yields a
/// row with ok = false. The cell with the best validation accuracy (first on
/// ties) is marked selected.
std::vector<SweepRow> run_sweep(const LabeledDataset &data, const SweepGrid &grid, const PipelineConfig &base,
                                unsigned jobs = 1);

std::string format_sweep_csv(const std::vector<SweepRow> &rows);

} // namespace bos
