#pragma once

#include "bos/segfeat.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace bos {

inline constexpr double kStdFloor = 1e-12;
inline constexpr int kDefaultCodebookSize = 12;

/// Per-dimension z-score parameters learned on training segments.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std; // clamped to >= kStdFloor

  Eigen::Index dims() const { return mean.size(); }

  /// Row-wise z-scores of `x` (one sample per row).
  template <typename Derived> Eigen::MatrixXd apply(const Eigen::MatrixBase<Derived> &x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
  }

  template <typename Derived> Eigen::MatrixXd invert(const Eigen::MatrixBase<Derived> &z) const {
    return (z.array().rowwise() * std.transpose().array()).matrix().rowwise() + mean.transpose();
  }
};

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd> &x);

/// Indices of the rows chosen by k-means++ seeding: the first uniformly, each
/// further one with probability proportional to its squared distance to the
/// nearest row already chosen.
std::vector<Eigen::Index> kmeanspp_seed_indices(const Eigen::Ref<const Eigen::MatrixXd> &x, int k,
                                                std::uint64_t seed);

Eigen::MatrixXd kmeanspp_seed(const Eigen::Ref<const Eigen::MatrixXd> &x, int k, std::uint64_t seed);

struct LloydOptions {
  int max_iter = 300;
  double tol = 1e-6; // relative WCSS improvement
};

struct LloydResult {
  Eigen::MatrixXd centroids;
  std::vector<int> assignment;
  double wcss = 0.0;
  /// WCSS after every assignment step, in order.
  std::vector<double> wcss_history;
  int iterations = 0;
  bool converged = false;
};

/// Index of the nearest row of `centroids`; ties go to the lowest index.
int nearest_centroid(const Eigen::Ref<const Eigen::MatrixXd> &centroids,
                     const Eigen::Ref<const Eigen::RowVectorXd> &z);

/// Lloyd iterations from the given initial centroids. Clusters that empty out
/// are reseeded with the point farthest from its assigned centroid.
LloydResult lloyd(const Eigen::Ref<const Eigen::MatrixXd> &x, Eigen::MatrixXd initial,
                  const LloydOptions &options = {});

/// k-means++ seeding followed by Lloyd iterations.
LloydResult lloyd_fit(const Eigen::Ref<const Eigen::MatrixXd> &x, int k, std::uint64_t seed,
                      const LloydOptions &options = {});

struct CodebookConfig {
  int segment_len = kDefaultSegmentLen;
  double blink_threshold = kDefaultBlinkThreshold;
  bool normalize = false;
};

/// The learned states: standardization plus K centroids in standardized space.
struct Codebook {
  Standardizer standardizer;
  Eigen::MatrixXd centroids;
  std::uint64_t seed = 0;
  double wcss = 0.0;
  std::vector<double> wcss_history;
  CodebookConfig config;

  int size() const { return static_cast<int>(centroids.rows()); }
  Eigen::Index dims() const { return centroids.cols(); }
};

/// Fits the standardizer and k-means on raw training segment features.
Codebook fit_codebook(const Eigen::Ref<const Eigen::MatrixXd> &train_features, int k, std::uint64_t seed,
                      const CodebookConfig &config = {}, const LloydOptions &options = {});

int assign_codeword(const Codebook &codebook, const Eigen::Ref<const Eigen::RowVectorXd> &raw);

struct StateHistogram {
  std::string video_id;
  /// Counts, or frequencies when normalized.
  Eigen::VectorXd values;
  int segments = 0;
  bool normalized = false;
};

StateHistogram encode_histogram(const Codebook &codebook, const Eigen::Ref<const Eigen::MatrixXd> &segments,
                                bool normalize = false, std::string video_id = {});

} // namespace bos
