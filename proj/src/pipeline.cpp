#include "bos/pipeline.hpp"

#include "bos/error.hpp"
#include "bos/random.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace bos {
namespace {

std::optional<Evaluation> maybe_evaluate(const OrdinalModel &model, const EncodedSplit &data, int num_levels) {
  if (data.labels.empty()) return std::nullopt;
  return evaluate_split(model, data, num_levels).evaluation;
}

std::string format_metric(const std::optional<Evaluation> &e, bool f1) {
  if (!e) return "";
  const double v = f1 ? (e->binary ? e->binary->f1 : std::nan("")) : e->accuracy;
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

} // namespace

std::uint64_t PipelineConfig::codebook_seed() const { return mix_seed(seed, 1); }
std::uint64_t PipelineConfig::model_seed() const { return mix_seed(seed, 2); }

LabeledDataset load_dataset(const DatasetManifest &manifest, double max_invalid_fraction) {
  manifest.validate();
  LabeledDataset out;
  out.num_levels = manifest.num_levels;
  out.videos.reserve(manifest.entries.size());
  for (const auto &e : manifest.entries) {
    FeatureTrack track = repair_track(parse_track(e.track_path, manifest.fps), max_invalid_fraction);
    track.video_id = e.video_id;
    out.videos.push_back({std::move(track), e.label, e.split});
  }
  return out;
}

LabeledDataset to_labeled(GeneratedDataset generated) {
  LabeledDataset out;
  out.num_levels = generated.num_levels;
  out.videos.reserve(generated.videos.size());
  for (auto &v : generated.videos) out.videos.push_back({std::move(v.track), v.label, v.split});
  return out;
}

std::vector<VideoSegments> extract_all(const LabeledDataset &data, int segment_len, double blink_threshold) {
  std::vector<VideoSegments> out;
  out.reserve(data.videos.size());
  const SegmentationConfig seg{segment_len};
  for (const auto &v : data.videos) {
    out.push_back({v.track.video_id, v.label, v.split, extract_segment_features(v.track, seg, blink_threshold)});
  }
  return out;
}

Codebook fit_codebook(const std::vector<VideoSegments> &videos, const PipelineConfig &cfg) {
  Eigen::Index rows = 0;
  for (const auto &v : videos) {
    if (v.split == Split::kTrain) rows += v.segments.rows();
  }
  FeatureMatrix stacked(rows, kSegmentDims);
  Eigen::Index at = 0;
  for (const auto &v : videos) {
    if (v.split != Split::kTrain) continue;
    stacked.middleRows(at, v.segments.rows()) = v.segments;
    at += v.segments.rows();
  }
  const CodebookConfig config{cfg.segment_len, cfg.blink_threshold, cfg.normalize};
  return fit_codebook(stacked, cfg.codebook_size, cfg.codebook_seed(), config, cfg.lloyd);
}

EncodedSplit encode_split(const Codebook &codebook, const std::vector<VideoSegments> &videos, Split split,
                          bool normalize) {
  EncodedSplit out;
  for (const auto &v : videos) {
    if (v.split != split) continue;
    out.video_ids.push_back(v.video_id);
    out.labels.push_back(v.label);
  }
  out.x.resize(static_cast<Eigen::Index>(out.labels.size()), codebook.size());
  Eigen::Index row = 0;
  for (const auto &v : videos) {
    if (v.split != split) continue;
    out.x.row(row++) = encode_histogram(codebook, v.segments, normalize, v.video_id).values.transpose();
  }
  return out;
}

SplitPredictions evaluate_split(const OrdinalModel &model, const EncodedSplit &data, int num_levels) {
  SplitPredictions out;
  std::vector<int> predicted;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    out.predictions.push_back(predict(model, data.x.row(i)));
    predicted.push_back(out.predictions.back().level);
  }
  out.evaluation = evaluate(data.labels, predicted, num_levels);
  return out;
}

BosRun run_bos(const LabeledDataset &data, const PipelineConfig &cfg) {
  const auto videos = extract_all(data, cfg.segment_len, cfg.blink_threshold);
  BosRun run;
  run.codebook = fit_codebook(videos, cfg);
  const auto train = encode_split(run.codebook, videos, Split::kTrain, cfg.normalize);
  run.model = train_ordinal(train.x, train.labels, data.num_levels, cfg.backend, cfg.hyperparams, cfg.model_seed(),
                            cfg.optimizer);
  run.validation =
      maybe_evaluate(run.model, encode_split(run.codebook, videos, Split::kValidation, cfg.normalize), data.num_levels);
  const auto test = encode_split(run.codebook, videos, Split::kTest, cfg.normalize);
  if (test.labels.empty()) throw Error(ErrorCode::kNotEnoughData, "test split is empty");
  run.test = evaluate_split(run.model, test, data.num_levels).evaluation;
  return run;
}

EncodedSplit functional_split(const LabeledDataset &data, Split split, double blink_threshold) {
  EncodedSplit out;
  for (const auto &v : data.videos) {
    if (v.split != split) continue;
    out.video_ids.push_back(v.track.video_id);
    out.labels.push_back(v.label);
  }
  out.x.resize(static_cast<Eigen::Index>(out.labels.size()), kSegmentDims);
  Eigen::Index row = 0;
  for (const auto &v : data.videos) {
    if (v.split != split) continue;
    out.x.row(row++) = functional_features(v.track, blink_threshold).transpose();
  }
  return out;
}

BaselineRun run_functional_baseline(const LabeledDataset &data, const PipelineConfig &cfg) {
  const auto train = functional_split(data, Split::kTrain, cfg.blink_threshold);
  BaselineRun run;
  run.model = train_baseline(train.x, train.labels, data.num_levels, cfg.backend, cfg.hyperparams, cfg.model_seed(),
                             cfg.optimizer);
  auto score = [&](Split split) -> std::optional<Evaluation> {
    const auto part = functional_split(data, split, cfg.blink_threshold);
    if (part.labels.empty()) return std::nullopt;
    std::vector<int> predicted;
    for (Eigen::Index i = 0; i < part.x.rows(); ++i) predicted.push_back(predict(run.model, part.x.row(i)).level);
    return evaluate(part.labels, predicted, data.num_levels);
  };
  run.validation = score(Split::kValidation);
  auto test = score(Split::kTest);
  if (!test) throw Error(ErrorCode::kNotEnoughData, "test split is empty");
  run.test = *test;
  return run;
}

std::vector<SweepRow> run_sweep(const LabeledDataset &data, const SweepGrid &grid, const PipelineConfig &base,
                                unsigned jobs) {
  if (grid.size() == 0) throw Error(ErrorCode::kMalformedInput, "sweep grid is empty");
  std::vector<SweepRow> rows(grid.size());
  std::size_t idx = 0;
  for (const int seg : grid.segment_lens) {
    for (const int k : grid.codebook_sizes) {
      for (const Backend b : grid.backends) {
        rows[idx].index = idx;
        rows[idx].segment_len = seg;
        rows[idx].codebook_size = k;
        rows[idx].backend = b;
        ++idx;
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow &row = rows[i];
      PipelineConfig cfg = base;
      cfg.segment_len = row.segment_len;
      cfg.codebook_size = row.codebook_size;
      cfg.backend = row.backend;
      try {
        auto run = run_bos(data, cfg);
        row.validation = run.validation;
        row.test = run.test;
        row.ok = true;
      } catch (const std::exception &e) {
        row.error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }

  SweepRow *best = nullptr;
  for (auto &row : rows) {
    if (!row.ok || !row.validation) continue;
    if (best == nullptr || row.validation->accuracy > best->validation->accuracy) best = &row;
  }
  if (best != nullptr) best->selected = true;
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = "cell,segment_len,codebook_size,backend,status,val_accuracy,val_f1,test_accuracy,test_f1,selected,error\n";
  for (const auto &r : rows) {
    std::string error = r.error;
    for (auto &c : error) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    out += std::to_string(r.index) + "," + std::to_string(r.segment_len) + "," + std::to_string(r.codebook_size) +
           "," + std::string(to_string(r.backend)) + "," + (r.ok ? "ok" : "failed") + "," +
           format_metric(r.validation, false) + "," + format_metric(r.validation, true) + "," +
           format_metric(r.test, false) + "," + format_metric(r.test, true) + "," + (r.selected ? "1" : "0") + "," +
           error + "\n";
  }
  return out;
}

} // namespace bos
