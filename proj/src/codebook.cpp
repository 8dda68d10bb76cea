#include "bos/codebook.hpp"

#include "bos/error.hpp"
#include "bos/random.hpp"

#include <limits>

namespace bos {

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd> &x) {
  if (x.rows() < 2) throw Error(ErrorCode::kNotEnoughData, "standardizer needs at least 2 samples");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.std = ((x.rowwise() - s.mean.transpose()).array().square().colwise().mean().sqrt())
              .transpose()
              .cwiseMax(kStdFloor);
  return s;
}

std::vector<Eigen::Index> kmeanspp_seed_indices(const Eigen::Ref<const Eigen::MatrixXd> &x, int k,
                                                std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (k < 1 || n < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(n) + " points cannot seed " + std::to_string(k) + " clusters");
  }
  Rng rng(seed);
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  chosen.push_back(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));

  Eigen::VectorXd d2 = (x.rowwise() - x.row(chosen.back())).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = d2.sum();
    if (!(total > 0.0)) {
      throw Error(ErrorCode::kTooFewPoints, "fewer than " + std::to_string(k) + " distinct points");
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d2(i) <= 0.0) continue;
      acc += d2(i);
      pick = i;
      if (acc > target) break;
    }
    chosen.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return chosen;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::Ref<const Eigen::MatrixXd> &x, int k, std::uint64_t seed) {
  const auto idx = kmeanspp_seed_indices(x, k, seed);
  Eigen::MatrixXd c(k, x.cols());
  for (int j = 0; j < k; ++j) c.row(j) = x.row(idx[static_cast<std::size_t>(j)]);
  return c;
}

int nearest_centroid(const Eigen::Ref<const Eigen::MatrixXd> &centroids,
                     const Eigen::Ref<const Eigen::RowVectorXd> &z) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d = (centroids.row(j) - z).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

namespace {

double assign_all(const Eigen::Ref<const Eigen::MatrixXd> &x, const Eigen::MatrixXd &centroids,
                  std::vector<int> &assignment, Eigen::VectorXd &dist2) {
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int j = nearest_centroid(centroids, x.row(i));
    assignment[static_cast<std::size_t>(i)] = j;
    dist2(i) = (centroids.row(j) - x.row(i)).squaredNorm();
    wcss += dist2(i);
  }
  return wcss;
}

} // namespace

LloydResult lloyd(const Eigen::Ref<const Eigen::MatrixXd> &x, Eigen::MatrixXd initial,
                  const LloydOptions &options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = initial.rows();
  if (k < 1 || n < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(n) + " points cannot form " + std::to_string(k) + " clusters");
  }
  if (initial.cols() != x.cols()) throw Error(ErrorCode::kDimensionMismatch, "centroid width differs from data");
  if (options.max_iter < 1) throw Error(ErrorCode::kMalformedInput, "max_iter must be >= 1");

  LloydResult r;
  r.centroids = std::move(initial);
  r.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;
  Eigen::VectorXd dist2(n);

  for (int it = 0;; ++it) {
    const double wcss = assign_all(x, r.centroids, r.assignment, dist2);
    r.wcss_history.push_back(wcss);
    r.wcss = wcss;
    if (it > 0) {
      if (r.assignment == previous) {
        r.converged = true;
        break;
      }
      const double before = r.wcss_history[r.wcss_history.size() - 2];
      if (before - wcss < options.tol * before) {
        r.converged = true;
        break;
      }
    }
    if (wcss == 0.0) {
      r.converged = true;
      break;
    }
    if (it + 1 >= options.max_iter) break;

    // Centroid update.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = r.assignment[static_cast<std::size_t>(i)];
      sums.row(j) += x.row(i);
      ++counts(j);
    }
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts(j) > 0) {
        r.centroids.row(j) = sums.row(j) / static_cast<double>(counts(j));
        continue;
      }
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        if (far < 0 || dist2(i) > dist2(far)) far = i;
      }
      taken[static_cast<std::size_t>(far)] = true;
      r.centroids.row(j) = x.row(far);
    }
    previous = r.assignment;
    ++r.iterations;
  }
  return r;
}

LloydResult lloyd_fit(const Eigen::Ref<const Eigen::MatrixXd> &x, int k, std::uint64_t seed,
                      const LloydOptions &options) {
  return lloyd(x, kmeanspp_seed(x, k, seed), options);
}

Codebook fit_codebook(const Eigen::Ref<const Eigen::MatrixXd> &train_features, int k, std::uint64_t seed,
                      const CodebookConfig &config, const LloydOptions &options) {
  if (k < 2) throw Error(ErrorCode::kMalformedInput, "codebook size must be >= 2");
  if (train_features.rows() < k) {
    throw Error(ErrorCode::kTooFewPoints, std::to_string(train_features.rows()) +
                                              " training segments cannot fit " + std::to_string(k) +
                                              " codewords");
  }
  Codebook cb;
  cb.standardizer = fit_standardizer(train_features);
  const Eigen::MatrixXd z = cb.standardizer.apply(train_features);
  auto fit = lloyd_fit(z, k, seed, options);
  cb.centroids = std::move(fit.centroids);
  cb.wcss = fit.wcss;
  cb.wcss_history = std::move(fit.wcss_history);
  cb.seed = seed;
  cb.config = config;
  return cb;
}

int assign_codeword(const Codebook &codebook, const Eigen::Ref<const Eigen::RowVectorXd> &raw) {
  if (raw.size() != codebook.dims()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature vector has " + std::to_string(raw.size()) +
                                                   " dims, codebook has " + std::to_string(codebook.dims()));
  }
  const Eigen::RowVectorXd z =
      (raw - codebook.standardizer.mean.transpose()).cwiseQuotient(codebook.standardizer.std.transpose());
  return nearest_centroid(codebook.centroids, z);
}

StateHistogram encode_histogram(const Codebook &codebook, const Eigen::Ref<const Eigen::MatrixXd> &segments,
                                bool normalize, std::string video_id) {
  if (segments.rows() == 0) throw Error(ErrorCode::kEmptySegmentList, "no segments to encode for " + video_id);
  StateHistogram h;
  h.video_id = std::move(video_id);
  h.values = Eigen::VectorXd::Zero(codebook.size());
  for (Eigen::Index s = 0; s < segments.rows(); ++s) h.values(assign_codeword(codebook, segments.row(s))) += 1.0;
  h.segments = static_cast<int>(segments.rows());
  if (normalize) {
    h.values /= static_cast<double>(h.segments);
    h.normalized = true;
  }
  return h;
}

} // namespace bos
