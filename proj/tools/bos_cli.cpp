// bos: command-line driver for the bag-of-states engagement pipeline.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 config mismatch.

#include "bos/error.hpp"
#include "bos/pipeline.hpp"
#include "bos/serialize.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace {

using namespace bos;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitMismatch = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int segment_len = kDefaultSegmentLen;
  int codebook_size = kDefaultCodebookSize;
  double blink_threshold = kDefaultBlinkThreshold;
  bool normalize = false;
  std::string backend = "rbf";
  double lambda = 1.0;
  double gamma = 0.01;
  std::string out;
  double max_invalid_fraction = kDefaultMaxInvalidFraction;

  CLI::Option *segment_len_opt = nullptr;
  CLI::Option *codebook_size_opt = nullptr;
  CLI::Option *blink_opt = nullptr;
  CLI::Option *normalize_opt = nullptr;

  PipelineConfig pipeline() const {
    PipelineConfig cfg;
    cfg.segment_len = segment_len;
    cfg.codebook_size = codebook_size;
    cfg.blink_threshold = blink_threshold;
    cfg.normalize = normalize;
    cfg.backend = parse_backend(backend);
    cfg.hyperparams = {lambda, gamma};
    cfg.seed = seed.value_or(0);
    return cfg;
  }
};

void require_out(const GlobalOptions &g) {
  if (g.out.empty()) throw UsageError("--out is required");
}

std::string read_text(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct LoadedCodebook {
  Codebook codebook;
  std::string hash;
};

LoadedCodebook load_codebook(const fs::path &path) {
  const auto j = read_json_file(path);
  return {codebook_from_json(j), content_hash(canonical_dump(j))};
}

struct LoadedModel {
  ModelFile file;
  std::string hash;
};

LoadedModel load_model(const fs::path &path) {
  const auto j = read_json_file(path);
  return {model_from_json(j), content_hash(canonical_dump(j))};
}

// Flags that disagree with what the codebook was fitted with would silently
// change the features, so they are refused.
void check_codebook_flags(const GlobalOptions &g, const Codebook &cb) {
  auto mismatch = [](const std::string &what) {
    throw Error(ErrorCode::kConfigMismatch, what + " differs from the value stored in the codebook");
  };
  if (g.segment_len_opt->count() > 0 && g.segment_len != cb.config.segment_len) mismatch("--segment-len");
  if (g.codebook_size_opt->count() > 0 && g.codebook_size != cb.size()) mismatch("--codebook-size");
  if (g.blink_opt->count() > 0 && g.blink_threshold != cb.config.blink_threshold) mismatch("--blink-threshold");
  if (g.normalize_opt->count() > 0 && g.normalize != cb.config.normalize) mismatch("--normalize");
}

std::optional<Split> parse_split_filter(const std::string &text) {
  if (text == "all") return std::nullopt;
  return parse_split(text);
}

// Segments every video in the manifest with the codebook's settings.
std::vector<VideoSegments> segments_for(const DatasetManifest &manifest, const Codebook &cb, double max_invalid) {
  const auto data = load_dataset(manifest, max_invalid);
  return extract_all(data, cb.config.segment_len, cb.config.blink_threshold);
}

nlohmann::json config_json(const PipelineConfig &cfg) {
  return {{"segment_len", cfg.segment_len},
          {"codebook_size", cfg.codebook_size},
          {"blink_threshold", cfg.blink_threshold},
          {"normalize", cfg.normalize},
          {"backend", std::string(to_string(cfg.backend))},
          {"lambda", cfg.hyperparams.lambda},
          {"gamma", cfg.hyperparams.gamma},
          {"seed", cfg.seed}};
}

std::string results_csv(const std::string &dataset, const std::string &split, const PipelineConfig &cfg,
                        const std::string &pipeline, const Evaluation &e) {
  std::string out = "dataset,pipeline,split,segment_len,codebook_size,backend,lambda,gamma,seed,n,accuracy,"
                    "precision,recall,f1\n";
  out += dataset + "," + pipeline + "," + split + "," + std::to_string(cfg.segment_len) + "," +
         std::to_string(cfg.codebook_size) + "," + std::string(to_string(cfg.backend)) + "," +
         fmt(cfg.hyperparams.lambda) + "," + fmt(cfg.hyperparams.gamma) + "," + std::to_string(cfg.seed) + "," +
         std::to_string(e.total) + "," + fmt(e.accuracy) + ",";
  if (e.binary) out += fmt(e.binary->precision) + "," + fmt(e.binary->recall) + "," + fmt(e.binary->f1);
  else out += ",,";
  return out + "\n";
}

void print_evaluation(const std::string &label, const Evaluation &e) {
  std::cout << label << ": n=" << e.total << " accuracy=" << fmt(e.accuracy);
  if (e.binary) {
    std::cout << " precision=" << fmt(e.binary->precision) << " recall=" << fmt(e.binary->recall)
              << " f1=" << fmt(e.binary->f1);
  }
  std::cout << '\n';
}

// --- gen -------------------------------------------------------------------

struct GenOptions {
  std::string config;
  std::string preset = "frequency";
  bool dump_config = false;
};

int cmd_gen(const GlobalOptions &g, const GenOptions &o) {
  GeneratorConfig cfg;
  if (!o.config.empty()) {
    cfg = generator_config_from_json(read_text(o.config));
  } else if (o.preset == "frequency") {
    cfg = default_generator_config();
  } else if (o.preset == "order") {
    cfg = order_generator_config();
  } else if (o.preset == "single-state") {
    cfg = single_state_generator_config();
  } else {
    throw UsageError("unknown preset '" + o.preset + "'");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (o.dump_config) {
    std::cout << generator_config_to_json(cfg);
    return kExitOk;
  }
  require_out(g);
  const auto dataset = generate_dataset(cfg);
  const auto manifest = write_dataset(g.out, dataset, cfg.fps);
  std::array<int, 3> per_split{};
  for (const auto &e : manifest.entries) ++per_split[static_cast<std::size_t>(e.split)];
  std::cout << "wrote " << manifest.entries.size() << " tracks (" << cfg.frames_per_video << " frames, "
            << (cfg.mode == LabelingMode::kOrder ? "order" : "frequency") << " mode) to " << g.out
            << "; train/validation/test = " << per_split[0] << "/" << per_split[1] << "/" << per_split[2] << '\n';
  return kExitOk;
}

// --- fit-codebook ------------------------------------------------------------

struct FitOptions {
  std::string manifest;
  int max_iter = 300;
  double tol = 1e-6;
  std::string segments_out;
};

int cmd_fit(const GlobalOptions &g, const FitOptions &o) {
  require_out(g);
  auto cfg = g.pipeline();
  cfg.lloyd = {o.max_iter, o.tol};
  const auto manifest = read_manifest(o.manifest);
  const auto data = load_dataset(manifest, g.max_invalid_fraction);
  const auto videos = extract_all(data, cfg.segment_len, cfg.blink_threshold);
  std::cerr << "fitting " << cfg.codebook_size << " codewords on the train split\n";
  const auto cb = fit_codebook(videos, cfg);
  for (std::size_t i = 0; i < cb.wcss_history.size(); ++i) {
    std::cerr << "  lloyd iteration " << i << " wcss " << fmt(cb.wcss_history[i]) << '\n';
  }
  const auto hash = write_json_file(g.out, codebook_to_json(cb));
  if (!o.segments_out.empty()) {
    std::vector<std::string> ids;
    std::vector<FeatureMatrix> features;
    for (const auto &v : videos) {
      ids.push_back(v.video_id);
      features.push_back(v.segments);
    }
    write_text(o.segments_out, format_segment_features_csv(ids, features));
  }
  std::cout << "codebook K=" << cb.size() << " dims=" << cb.dims() << " wcss=" << fmt(cb.wcss) << " hash=" << hash
            << " -> " << g.out << '\n';
  return kExitOk;
}

// --- encode ------------------------------------------------------------------

struct EncodeOptions {
  std::string manifest;
  std::string codebook;
  std::string split = "all";
};

std::string histograms_csv(const std::vector<VideoSegments> &videos, const Codebook &cb,
                           std::optional<Split> filter) {
  std::string out = "video_id,split,label";
  for (int k = 0; k < cb.size(); ++k) out += ",h" + std::to_string(k);
  out += '\n';
  for (const auto &v : videos) {
    if (filter && v.split != *filter) continue;
    const auto h = encode_histogram(cb, v.segments, cb.config.normalize, v.video_id);
    out += v.video_id + "," + std::string(to_string(v.split)) + "," + std::to_string(v.label);
    for (Eigen::Index k = 0; k < h.values.size(); ++k) out += "," + fmt(h.values(k));
    out += '\n';
  }
  return out;
}

int cmd_encode(const GlobalOptions &g, const EncodeOptions &o) {
  require_out(g);
  const auto cb = load_codebook(o.codebook);
  check_codebook_flags(g, cb.codebook);
  const auto videos = segments_for(read_manifest(o.manifest), cb.codebook, g.max_invalid_fraction);
  write_text(g.out, histograms_csv(videos, cb.codebook, parse_split_filter(o.split)));
  std::cout << "encoded histograms -> " << g.out << '\n';
  return kExitOk;
}

// --- train -------------------------------------------------------------------

struct TrainOptions {
  std::string manifest;
  std::string codebook;
};

int cmd_train(const GlobalOptions &g, const TrainOptions &o) {
  require_out(g);
  const auto cb = load_codebook(o.codebook);
  check_codebook_flags(g, cb.codebook);
  auto cfg = g.pipeline();
  cfg.normalize = cb.codebook.config.normalize;
  const auto manifest = read_manifest(o.manifest);
  const auto videos = segments_for(manifest, cb.codebook, g.max_invalid_fraction);
  const auto train = encode_split(cb.codebook, videos, Split::kTrain, cfg.normalize);
  std::cerr << "training on " << train.labels.size() << " train videos\n";
  ModelFile file;
  file.model = train_ordinal(train.x, train.labels, manifest.num_levels, cfg.backend, cfg.hyperparams,
                             cfg.model_seed(), cfg.optimizer);
  file.codebook_hash = cb.hash;
  file.normalize = cfg.normalize;
  const auto hash = write_json_file(g.out, model_to_json(file));
  std::cout << "model levels=" << file.model.num_levels << " classifiers=" << file.model.classifiers.size()
            << " backend=" << to_string(cfg.backend) << " hash=" << hash << " -> " << g.out << '\n';
  return kExitOk;
}

// --- predict / evaluate --------------------------------------------------------

struct PredictOptions {
  std::string manifest;
  std::string codebook;
  std::string model;
  std::string histograms;
  std::string split = "test";
};

void check_model_chain(const LoadedModel &model, const LoadedCodebook &cb) {
  if (model.file.pipeline != kPipelineBagOfStates) {
    throw Error(ErrorCode::kConfigMismatch, "model was trained by the " + model.file.pipeline + " pipeline");
  }
  if (model.file.codebook_hash != cb.hash) {
    throw Error(ErrorCode::kConfigMismatch, "model was trained with codebook " + model.file.codebook_hash +
                                                ", got " + cb.hash);
  }
}

EncodedSplit parse_histograms_csv(const std::string &text) {
  EncodedSplit out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kMalformedInput, "empty histogram file");
  std::vector<std::vector<double>> rows;
  long row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() < 4) throw Error(ErrorCode::kMalformedInput, "histogram row " + std::to_string(row_no) + " too short");
    out.video_ids.push_back(fields[0]);
    out.labels.push_back(std::stoi(fields[2]));
    std::vector<double> values;
    for (std::size_t i = 3; i < fields.size(); ++i) values.push_back(std::stod(fields[i]));
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(ErrorCode::kDimensionMismatch, "histogram row " + std::to_string(row_no) + " has a different width");
    }
    rows.push_back(std::move(values));
  }
  const auto width = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  out.x.resize(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), width);
  }
  return out;
}

EncodedSplit inputs_for(const GlobalOptions &g, const PredictOptions &o, const LoadedModel &model) {
  if (!o.histograms.empty()) return parse_histograms_csv(read_text(o.histograms));
  if (o.manifest.empty() || o.codebook.empty()) {
    throw UsageError("give --histograms, or --manifest together with --codebook");
  }
  const auto cb = load_codebook(o.codebook);
  check_codebook_flags(g, cb.codebook);
  check_model_chain(model, cb);
  const auto videos = segments_for(read_manifest(o.manifest), cb.codebook, g.max_invalid_fraction);
  const auto filter = parse_split_filter(o.split);
  if (!filter) throw UsageError("predict needs a single split");
  std::cerr << "split filter: " << o.split << " (other splits are not read)\n";
  return encode_split(cb.codebook, videos, *filter, model.file.normalize);
}

int cmd_predict(const GlobalOptions &g, const PredictOptions &o) {
  require_out(g);
  const auto model = load_model(o.model);
  const auto inputs = inputs_for(g, o, model);
  std::string out = "video_id,level";
  for (int l = 0; l < model.file.model.num_levels; ++l) out += ",p" + std::to_string(l);
  out += '\n';
  for (Eigen::Index i = 0; i < inputs.x.rows(); ++i) {
    const auto p = predict(model.file.model, inputs.x.row(i));
    out += inputs.video_ids[static_cast<std::size_t>(i)] + "," + std::to_string(p.level);
    for (Eigen::Index l = 0; l < p.probabilities.size(); ++l) out += "," + fmt(p.probabilities(l));
    out += '\n';
  }
  write_text(g.out, out);
  std::cout << "predicted " << inputs.x.rows() << " videos -> " << g.out << '\n';
  return kExitOk;
}

struct EvaluateOptions {
  PredictOptions inputs;
  std::string csv_out;
};

int cmd_evaluate(const GlobalOptions &g, const EvaluateOptions &o) {
  require_out(g);
  if (o.inputs.manifest.empty() || o.inputs.codebook.empty()) {
    throw UsageError("evaluate needs --manifest and --codebook");
  }
  const auto model = load_model(o.inputs.model);
  const auto cb = load_codebook(o.inputs.codebook);
  const auto data = inputs_for(g, o.inputs, model);
  const auto result = evaluate_split(model.file.model, data, model.file.model.num_levels);

  auto cfg = g.pipeline();
  cfg.segment_len = cb.codebook.config.segment_len;
  cfg.codebook_size = cb.codebook.size();
  cfg.blink_threshold = cb.codebook.config.blink_threshold;
  cfg.normalize = cb.codebook.config.normalize;
  cfg.backend = model.file.model.backend;
  cfg.hyperparams = model.file.model.hyperparams;
  cfg.seed = model.file.model.seed;
  auto j = evaluation_to_json(result.evaluation);
  j["dataset"] = o.inputs.manifest;
  j["pipeline"] = std::string(kPipelineBagOfStates);
  j["split"] = o.inputs.split;
  j["config"] = config_json(cfg);
  j["config"]["model_seed"] = model.file.model.seed;
  j["config"].erase("seed");
  j["model_hash"] = model.hash;
  j["codebook_hash"] = cb.hash;
  write_json_file(g.out, j);
  if (!o.csv_out.empty()) {
    write_text(o.csv_out, results_csv(o.inputs.manifest, o.inputs.split, cfg, "bag-of-states", result.evaluation));
  }
  print_evaluation(o.inputs.split, result.evaluation);
  return kExitOk;
}

// --- sweep ---------------------------------------------------------------------

struct SweepOptions {
  std::string manifest;
  std::vector<int> segment_lens;
  std::vector<int> codebook_sizes;
  std::vector<std::string> backends;
  unsigned jobs = 0;
  CLI::Option *seg_opt = nullptr;
  CLI::Option *k_opt = nullptr;
  CLI::Option *backend_opt = nullptr;
};

int cmd_sweep(const GlobalOptions &g, const SweepOptions &o) {
  require_out(g);
  if (o.seg_opt->count() == 0 && o.k_opt->count() == 0 && o.backend_opt->count() == 0) {
    throw UsageError("empty sweep grid: give at least one of --segment-lens, --codebook-sizes, --backends");
  }
  SweepGrid grid;
  grid.segment_lens = o.seg_opt->count() > 0 ? o.segment_lens : std::vector<int>{g.segment_len};
  grid.codebook_sizes = o.k_opt->count() > 0 ? o.codebook_sizes : std::vector<int>{g.codebook_size};
  if (o.backend_opt->count() > 0) {
    for (const auto &b : o.backends) grid.backends.push_back(parse_backend(b));
  } else {
    grid.backends.push_back(parse_backend(g.backend));
  }
  if (grid.size() == 0) throw UsageError("empty sweep grid");

  const auto data = load_dataset(read_manifest(o.manifest), g.max_invalid_fraction);
  const unsigned jobs = o.jobs > 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::cerr << "sweeping " << grid.size() << " cells with " << jobs << " worker(s)\n";
  const auto rows = run_sweep(data, grid, g.pipeline(), jobs);
  write_text(g.out, format_sweep_csv(rows));
  for (const auto &r : rows) {
    if (!r.ok) std::cerr << "  cell " << r.index << " failed: " << r.error << '\n';
    if (r.selected) {
      std::cout << "selected cell " << r.index << ": segment_len=" << r.segment_len << " K=" << r.codebook_size
                << " backend=" << to_string(r.backend) << " val_accuracy=" << fmt(r.validation->accuracy)
                << " test_accuracy=" << fmt(r.test->accuracy) << '\n';
    }
  }
  std::cout << "wrote " << rows.size() << " rows -> " << g.out << '\n';
  return kExitOk;
}

// --- baseline ------------------------------------------------------------------

struct BaselineOptions {
  std::string manifest;
  std::string model_out;
  std::string csv_out;
};

int cmd_baseline(const GlobalOptions &g, const BaselineOptions &o) {
  require_out(g);
  const auto cfg = g.pipeline();
  const auto data = load_dataset(read_manifest(o.manifest), g.max_invalid_fraction);
  const auto run = run_functional_baseline(data, cfg);

  ModelFile file;
  file.model = run.model.model;
  file.pipeline = std::string(kPipelineFunctionalBaseline);
  file.input_standardizer = run.model.standardizer;
  std::string model_hash;
  if (!o.model_out.empty()) model_hash = write_json_file(o.model_out, model_to_json(file));
  else model_hash = content_hash(canonical_dump(model_to_json(file)));

  auto j = evaluation_to_json(run.test);
  j["dataset"] = o.manifest;
  j["pipeline"] = std::string(kPipelineFunctionalBaseline);
  j["split"] = "test";
  j["config"] = config_json(cfg);
  j["config"].erase("segment_len");
  j["config"].erase("codebook_size");
  j["config"].erase("normalize");
  j["model_hash"] = model_hash;
  if (run.validation) j["validation"] = evaluation_to_json(*run.validation);
  write_json_file(g.out, j);
  if (!o.csv_out.empty()) {
    write_text(o.csv_out, results_csv(o.manifest, "test", cfg, "functional-baseline", run.test));
  }
  if (run.validation) print_evaluation("validation", *run.validation);
  print_evaluation("test", run.test);
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bag-of-states engagement measurement pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random choice (default 0; gen: config seed)");
  g.segment_len_opt = app.add_option("--segment-len", g.segment_len, "Segment length in frames")
                          ->check(CLI::Range(3, 1 << 30));
  g.codebook_size_opt = app.add_option("--codebook-size", g.codebook_size, "Number of codewords K")->check(CLI::Range(2, 1 << 20));
  g.blink_opt = app.add_option("--blink-threshold", g.blink_threshold, "AU45 peak threshold");
  g.normalize_opt = app.add_flag("--normalize", g.normalize, "Use codeword frequencies instead of counts");
  app.add_option("--backend", g.backend, "Binary classifier backend")->check(CLI::IsMember({"linear", "rbf"}));
  app.add_option("--lambda", g.lambda, "L2 regularization strength (1/C)")->check(CLI::NonNegativeNumber);
  app.add_option("--gamma", g.gamma, "RBF kernel width")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path");
  app.add_option("--max-invalid-fraction", g.max_invalid_fraction, "Reject tracks with more invalid frames")
      ->check(CLI::Range(0.0, 1.0));

  GenOptions gen;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset (tracks + manifest)");
  gen_cmd->add_option("--config", gen.config, "Generator config JSON")->check(CLI::ExistingFile);
  gen_cmd->add_option("--preset", gen.preset, "Built-in config when --config is absent")
      ->check(CLI::IsMember({"frequency", "order", "single-state"}));
  gen_cmd->add_flag("--dump-config", gen.dump_config, "Print the effective config and exit");

  FitOptions fit;
  auto *fit_cmd = app.add_subcommand("fit-codebook", "Learn the codebook of states from the train split");
  fit_cmd->add_option("--manifest", fit.manifest, "Dataset manifest")->required();
  fit_cmd->add_option("--max-iter", fit.max_iter, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tol", fit.tol, "Relative WCSS improvement threshold")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--segments-out", fit.segments_out, "Also dump segment features as CSV");

  EncodeOptions enc;
  auto *enc_cmd = app.add_subcommand("encode", "Encode videos as codeword histograms (CSV)");
  enc_cmd->add_option("--manifest", enc.manifest, "Dataset manifest")->required();
  enc_cmd->add_option("--codebook", enc.codebook, "Codebook JSON")->required();
  enc_cmd->add_option("--split", enc.split, "Split to encode")->check(CLI::IsMember({"all", "train", "validation", "test"}));

  TrainOptions train;
  auto *train_cmd = app.add_subcommand("train", "Train the ordinal classifier on train histograms");
  train_cmd->add_option("--manifest", train.manifest, "Dataset manifest")->required();
  train_cmd->add_option("--codebook", train.codebook, "Codebook JSON")->required();

  PredictOptions pred;
  auto *pred_cmd = app.add_subcommand("predict", "Predict engagement levels");
  pred_cmd->add_option("--model", pred.model, "Model JSON")->required();
  pred_cmd->add_option("--manifest", pred.manifest, "Dataset manifest");
  pred_cmd->add_option("--codebook", pred.codebook, "Codebook JSON");
  pred_cmd->add_option("--histograms", pred.histograms, "Histogram CSV from `encode`");
  pred_cmd->add_option("--split", pred.split, "Split to predict")->check(CLI::IsMember({"train", "validation", "test"}));

  EvaluateOptions eval;
  auto *eval_cmd = app.add_subcommand("evaluate", "Score a model on one split and write results JSON");
  eval_cmd->add_option("--model", eval.inputs.model, "Model JSON")->required();
  eval_cmd->add_option("--manifest", eval.inputs.manifest, "Dataset manifest")->required();
  eval_cmd->add_option("--codebook", eval.inputs.codebook, "Codebook JSON")->required();
  eval_cmd->add_option("--split", eval.inputs.split, "Split to score")->check(CLI::IsMember({"train", "validation", "test"}));
  eval_cmd->add_option("--csv-out", eval.csv_out, "Also write a one-row results CSV");

  SweepOptions sweep;
  auto *sweep_cmd = app.add_subcommand("sweep", "Grid over segment length, codebook size and backend");
  sweep_cmd->add_option("--manifest", sweep.manifest, "Dataset manifest")->required();
  sweep.seg_opt = sweep_cmd->add_option("--segment-lens", sweep.segment_lens, "Segment lengths")->delimiter(',');
  sweep.k_opt = sweep_cmd->add_option("--codebook-sizes", sweep.codebook_sizes, "Codebook sizes")->delimiter(',');
  sweep.backend_opt = sweep_cmd->add_option("--backends", sweep.backends, "Backends")->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (default: hardware concurrency)");

  BaselineOptions base;
  auto *base_cmd = app.add_subcommand("baseline", "Whole-video functional features baseline");
  base_cmd->add_option("--manifest", base.manifest, "Dataset manifest")->required();
  base_cmd->add_option("--model-out", base.model_out, "Also write the trained model");
  base_cmd->add_option("--csv-out", base.csv_out, "Also write a one-row results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen);
    if (*fit_cmd) return cmd_fit(g, fit);
    if (*enc_cmd) return cmd_encode(g, enc);
    if (*train_cmd) return cmd_train(g, train);
    if (*pred_cmd) return cmd_predict(g, pred);
    if (*eval_cmd) return cmd_evaluate(g, eval);
    if (*sweep_cmd) return cmd_sweep(g, sweep);
    if (*base_cmd) return cmd_baseline(g, base);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfigMismatch ? kExitMismatch : kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
