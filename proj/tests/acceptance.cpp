// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "bos/codebook.hpp"
#include "bos/log.hpp"
#include "bos/metrics.hpp"
#include "bos/ordinal.hpp"
#include "bos/pipeline.hpp"
#include "bos/random.hpp"
#include "bos/segfeat.hpp"
#include "bos/serialize.hpp"
#include "bos/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace bos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

LabeledDataset dataset(GeneratorConfig cfg, int videos = 600) {
  cfg.num_videos = videos;
  return to_labeled(generate_dataset(cfg));
}

PipelineConfig reference_pipeline() {
  PipelineConfig cfg;
  cfg.segment_len = 200;
  cfg.codebook_size = 12;
  cfg.backend = Backend::kRbf;
  cfg.hyperparams = {1.0, 0.01};
  return cfg;
}

Eigen::MatrixXd random_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

Outcome order_invariance() {
  const auto start = Clock::now();
  auto cfg = default_generator_config();
  cfg.num_videos = 200;
  const auto data = generate_dataset(cfg);

  Eigen::MatrixXd train(0, kSegmentDims);
  std::vector<FeatureMatrix> per_video;
  for (const auto &v : data.videos) {
    per_video.push_back(extract_segment_features(v.track, {200}));
    if (v.split != Split::kTrain) continue;
    train.conservativeResize(train.rows() + per_video.back().rows(), Eigen::NoChange);
    train.bottomRows(per_video.back().rows()) = per_video.back();
  }
  const auto cb = fit_codebook(train, 12, 1);

  Rng rng(2024);
  int mismatches = 0;
  for (const auto &f : per_video) {
    const auto reference = encode_histogram(cb, f);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(f.rows()));
    std::iota(order.begin(), order.end(), 0);
    for (int rep = 0; rep < 5; ++rep) {
      rng.shuffle(order.begin(), order.end());
      const FeatureMatrix permuted = f(order, Eigen::all);
      for (bool normalize : {false, true}) {
        const auto a = encode_histogram(cb, f, normalize);
        const auto b = encode_histogram(cb, permuted, normalize);
        if (std::memcmp(a.values.data(), b.values.data(), sizeof(double) * a.values.size()) != 0) ++mismatches;
      }
      if (encode_histogram(cb, permuted).values != reference.values) ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          fmt("%.0f mismatched histograms over 200 videos x 5 permutations, %.2f s (limit 10 s)", mismatches, elapsed)};
}

Outcome frequency_separability() {
  const auto data = dataset(default_generator_config());
  const auto start = Clock::now();
  const auto run = run_bos(data, reference_pipeline());
  const double elapsed = seconds_since(start);
  return {run.test.accuracy >= 0.90 && elapsed < 120.0,
          fmt("test accuracy %.4f (>= 0.90), pipeline %.2f s (limit 120 s)", run.test.accuracy, elapsed)};
}

Outcome order_blindness() {
  const auto data = dataset(order_generator_config());
  const auto run = run_bos(data, reference_pipeline());
  const double acc = run.test.accuracy;
  return {acc >= 0.40 && acc <= 0.60, fmt("order-mode test accuracy %.4f (within [0.40, 0.60])", acc)};
}

Outcome baseline_gap() {
  const auto multi = dataset(default_generator_config());
  const auto single = dataset(single_state_generator_config());
  const auto cfg = reference_pipeline();
  const double bos_multi = run_bos(multi, cfg).test.accuracy;
  const double base_multi = run_functional_baseline(multi, cfg).test.accuracy;
  const double bos_single = run_bos(single, cfg).test.accuracy;
  const double base_single = run_functional_baseline(single, cfg).test.accuracy;
  const bool gap = bos_multi - base_multi >= 0.05;
  const bool agree = std::abs(bos_single - base_single) <= 0.05;
  return {gap && agree, fmt("multi-state BoS %.4f vs baseline %.4f (gap >= 0.05); ", bos_multi, base_multi) +
                            fmt("single-state BoS %.4f vs baseline %.4f (|diff| <= 0.05)", bos_single, base_single)};
}

double best_accuracy(const std::vector<SweepRow> &rows, const std::function<bool(const SweepRow &)> &keep) {
  double best = -1.0;
  for (const auto &r : rows) {
    if (r.ok && keep(r)) best = std::max(best, r.test->accuracy);
  }
  return best;
}

Outcome sweep_shapes() {
  const auto data = dataset(default_generator_config());
  const auto base = reference_pipeline();

  SweepGrid seg_grid;
  for (int s = 160; s <= 480; s += 40) seg_grid.segment_lens.push_back(s);
  seg_grid.segment_lens.push_back(2400);
  seg_grid.codebook_sizes = {base.codebook_size};
  seg_grid.backends = {base.backend};
  const auto seg_rows = run_sweep(data, seg_grid, base, 1);
  const double interior = best_accuracy(seg_rows, [](const SweepRow &r) { return r.segment_len <= 480; });
  const double whole = best_accuracy(seg_rows, [](const SweepRow &r) { return r.segment_len == 2400; });

  SweepGrid k_grid;
  k_grid.segment_lens = {base.segment_len};
  for (int k = 2; k <= 16; ++k) k_grid.codebook_sizes.push_back(k);
  k_grid.backends = {base.backend};
  const auto k_rows = run_sweep(data, k_grid, base, 1);
  const double best_k = best_accuracy(k_rows, [](const SweepRow &) { return true; });
  const double k2 = best_accuracy(k_rows, [](const SweepRow &r) { return r.codebook_size == 2; });

  const bool seg_ok = whole >= 0.0 && interior - whole >= 0.10;
  const bool k_ok = k2 >= 0.0 && best_k - k2 >= 0.05;
  return {seg_ok && k_ok,
          fmt("segment 2400 accuracy %.4f vs best of 160..480 %.4f (gap >= 0.10); ", whole, interior) +
              fmt("K=2 accuracy %.4f vs best K %.4f (gap >= 0.05)", k2, best_k)};
}

double partition_wcss(const Eigen::MatrixXd &x, const std::vector<int> &assignment, int k) {
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
    int count = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (assignment[static_cast<std::size_t>(i)] == j) {
        mean += x.row(i);
        ++count;
      }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    mean /= count;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (assignment[static_cast<std::size_t>(i)] == j) total += (x.row(i) - mean).squaredNorm();
    }
  }
  return total;
}

double gradient_relative_error(const Eigen::MatrixXd &design, const Eigen::MatrixXd &reg, const Eigen::VectorXd &y,
                               double lambda, const Eigen::VectorXd &params) {
  const auto analytic = logistic_loss(design, reg, y, lambda, params).gradient;
  Eigen::VectorXd numeric(params.size());
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    Eigen::VectorXd up = params, down = params;
    up(i) += h;
    down(i) -= h;
    numeric(i) = (logistic_loss(design, reg, y, lambda, up).value - logistic_loss(design, reg, y, lambda, down).value) /
                 (2.0 * h);
  }
  return (analytic - numeric).norm() / std::max(analytic.norm(), 1e-12);
}

Outcome numerical_cores() {
  Rng rng(6);
  int lloyd_failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = static_cast<Eigen::Index>(20 + rng.index(80));
    const int k = 2 + static_cast<int>(rng.index(6));
    const Eigen::MatrixXd x = random_matrix(rng, n, 3);
    const auto r = lloyd_fit(x, k, static_cast<std::uint64_t>(rep), {1000, 0.0});
    bool ok = r.converged;
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i) ok &= r.wcss_history[i] <= r.wcss_history[i - 1];
    for (Eigen::Index i = 0; i < n; ++i) {
      ok &= nearest_centroid(r.centroids, x.row(i)) == r.assignment[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < k; ++j) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (r.assignment[static_cast<std::size_t>(i)] == j) {
          mean += x.row(i);
          ++count;
        }
      }
      ok &= count > 0 && mean / count == r.centroids.row(j);
    }
    lloyd_failures += !ok;
  }

  Eigen::MatrixXd fixture(4, 1);
  fixture << 0, 1, 10, 11;
  double brute = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < 15; ++mask) {
    std::vector<int> a(4);
    for (int i = 0; i < 4; ++i) a[static_cast<std::size_t>(i)] = (mask >> i) & 1;
    brute = std::min(brute, partition_wcss(fixture, a, 2));
  }
  const auto fit = lloyd_fit(fixture, 2, 0);
  std::vector<double> centers = {fit.centroids(0, 0), fit.centroids(1, 0)};
  std::sort(centers.begin(), centers.end());
  const bool fixture_ok = fit.wcss == 1.0 && brute == 1.0 && centers[0] == 0.5 && centers[1] == 10.5;

  double worst = 0.0;
  Rng grad_rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<Eigen::Index>(5 + grad_rng.index(40));
    const auto d = static_cast<Eigen::Index>(1 + grad_rng.index(12));
    const Eigen::MatrixXd x = random_matrix(grad_rng, n, d, 2.0);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<double>(grad_rng.index(2));
    const double lambda = grad_rng.uniform(0.0, 3.0);
    worst = std::max(worst, gradient_relative_error(x, Eigen::MatrixXd::Identity(d, d), y, lambda,
                                                    random_matrix(grad_rng, d + 1, 1)));
    const Eigen::MatrixXd k = rbf_gram(x, x, grad_rng.uniform(0.01, 1.0));
    worst = std::max(worst, gradient_relative_error(k, k, y, lambda, random_matrix(grad_rng, n + 1, 1)));
  }

  return {lloyd_failures == 0 && fixture_ok && worst <= 1e-5,
          fmt("Lloyd failures %.0f/100; {0,1,10,11} centroids %.4g, %.4g", lloyd_failures, centers[0], centers[1]) +
              fmt(" wcss %.4g (brute force %.4g); worst gradient relative error %.2e (<= 1e-5)", fit.wcss, brute,
                  worst)};
}

Outcome combiner() {
  const auto fixture = combine_probabilities(Eigen::Vector3d(0.9, 0.6, 0.2));
  const Eigen::Vector4d expected(0.1, 0.3, 0.4, 0.2);
  const double fixture_err = (fixture.probabilities - expected).cwiseAbs().maxCoeff();

  bool one_hot = true;
  for (int level = 0; level < 4; ++level) {
    Eigen::Vector3d p;
    for (int i = 0; i < 3; ++i) p(i) = level > i ? 1.0 : 0.0;
    const auto r = combine_probabilities(p);
    one_hot &= r.level == level && r.probabilities == Eigen::Vector4d::Unit(level);
  }

  Rng rng(7);
  double worst_sum = 0.0;
  bool nonnegative = true;
  for (int rep = 0; rep < 10000; ++rep) {
    const auto m = static_cast<Eigen::Index>(1 + rng.index(6));
    Eigen::VectorXd p(m);
    for (Eigen::Index i = 0; i < m; ++i) p(i) = rng.uniform();
    const auto r = combine_probabilities(p);
    worst_sum = std::max(worst_sum, std::abs(r.probabilities.sum() - 1.0));
    nonnegative &= r.probabilities.minCoeff() >= 0.0;
  }
  return {fixture_err <= 1e-12 && one_hot && worst_sum <= 1e-9 && nonnegative,
          fmt("fixture max error %.2e; ", fixture_err) + (one_hot ? "one-hot recovered; " : "one-hot NOT recovered; ") +
              fmt("worst |sum - 1| over 10000 inputs %.2e (<= 1e-9)", worst_sum)};
}

Outcome metric_fixtures() {
  const auto e = evaluate({1, 1, 0, 1, 0, 0, 0}, {1, 1, 1, 0, 0, 0, 0}, 2);
  const double err = std::max({std::abs(e.accuracy - 5.0 / 7.0), std::abs(e.binary->precision - 2.0 / 3.0),
                               std::abs(e.binary->recall - 2.0 / 3.0), std::abs(e.binary->f1 - 2.0 / 3.0)});
  std::vector<int> truth(72, 1);
  truth.insert(truth.end(), 57, 0);
  const auto majority = evaluate(truth, std::vector<int>(129, 1), 2);
  const double majority_err = std::abs(majority.accuracy - 72.0 / 129.0);
  return {err <= 1e-12 && majority_err <= 1e-12,
          fmt("TP/FP/FN/TN fixture max error %.2e; majority-class accuracy %.6f (72/129 = %.6f)", err,
              majority.accuracy, 72.0 / 129.0)};
}

std::string read_bytes(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_run(const fs::path &dir, const LabeledDataset &data, const PipelineConfig &cfg) {
  fs::create_directories(dir);
  const auto run = run_bos(data, cfg);
  const auto codebook_hash = write_json_file(dir / "codebook.json", codebook_to_json(run.codebook));
  ModelFile model;
  model.model = run.model;
  model.codebook_hash = codebook_hash;
  model.normalize = cfg.normalize;
  write_json_file(dir / "model.json", model_to_json(model));
  write_json_file(dir / "results.json", evaluation_to_json(run.test));
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "bos_acceptance_determinism";
  fs::remove_all(root);
  auto gen = default_generator_config();
  gen.num_videos = 200;
  const auto manifest_a = write_dataset(root / "data_a", generate_dataset(gen), gen.fps);
  const auto manifest_b = write_dataset(root / "data_b", generate_dataset(gen), gen.fps);
  auto cfg = reference_pipeline();
  cfg.seed = 11;
  write_run(root / "run_a", load_dataset(manifest_a), cfg);
  write_run(root / "run_b", load_dataset(manifest_b), cfg);

  int identical = 0;
  for (const char *name : {"codebook.json", "model.json", "results.json"}) {
    const auto a = read_bytes(root / "run_a" / name);
    identical += !a.empty() && a == read_bytes(root / "run_b" / name);
  }
  fs::remove_all(root);
  return {identical == 3, fmt("%.0f/3 of codebook, model and results files byte-identical across runs", identical)};
}

} // namespace

int main() {
  set_warning_sink([](const std::string &) {});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"order invariance", order_invariance},
      {"frequency-mode separability", frequency_separability},
      {"order-mode blindness", order_blindness},
      {"baseline gap", baseline_gap},
      {"sweep shapes", sweep_shapes},
      {"numerical cores", numerical_cores},
      {"ordinal combiner", combiner},
      {"metric fixtures", metric_fixtures},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s criterion %zu (%s): %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
