#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specapprox/classifier.hpp"
#include "specapprox/diffusion.hpp"
#include "specapprox/report.hpp"
#include "specapprox/spectral.hpp"
#include "specapprox/tasks.hpp"

namespace specapprox {

std::vector<Method> all_methods();

/// Runs one method on a kernel's normalized matrix. `rank` is the number of
/// eigenpairs for the exact solver, the landmark count for Nystrom and the
/// projection width for Gaussian projection. Weighted Nystrom samples in
/// proportion to the diagonal of the normalized matrix.
SpectralDecomposition decompose(const KernelMatrix& kernel, Method method, Eigen::Index rank,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bandwidth search

struct GridPoint {
  double epsilon = 0.0;
  std::optional<double> misclassification;
  std::string error;
};

struct GridSearchResult {
  std::vector<GridPoint> points;
  double best_epsilon = 0.0;
  double best_misclassification = 0.0;
};

/// Evaluates `misclassification_at` at every grid value and keeps the
/// minimizer (smaller epsilon on ties). Exceptions are recorded per point;
/// if every point fails a NumericalError lists them all.
GridSearchResult epsilon_grid_search(std::span<const double> grid,
                                     const std::function<double(double)>& misclassification_at);

// ---------------------------------------------------------------------------
// Manifold recovery and clustering

struct EmbeddingTaskConfig {
  std::string task = "manifold";
  double epsilon = 15.0;
  Eigen::Index m_nys = 141;
  Eigen::Index m_gp = 10;
  Eigen::Index p = 2;
  std::uint64_t seed = 0;
  std::vector<Method> methods = all_methods();
  /// Also compute the exact decomposition and score every method against it.
  bool with_reference = true;
};

struct MethodRun {
  Method method = Method::exact;
  SpectralDecomposition decomposition;
  Embedding embedding;
  double wall_ms = 0.0;
  std::optional<AlignmentReport> alignment;  ///< per-column |cos| against exact
  std::optional<AlignmentReport> capture;    ///< exact columns' energy inside the span
  std::optional<double> threshold_accuracy;  ///< first diffusion coordinate, two-class labels only
  std::optional<double> two_means_accuracy;
  double reconstruction_error = 0.0;
};

struct EmbeddingTaskOutcome {
  std::vector<MethodRun> runs;
  ExperimentReport report;

  [[nodiscard]] const MethodRun& run(Method method) const;
};

EmbeddingTaskOutcome run_embedding_task(const PointCloud& cloud, const EmbeddingTaskConfig& config);

// ---------------------------------------------------------------------------
// Semi-supervised classification

struct ClassificationConfig {
  std::string task = "classify";
  Eigen::Index m = 400;
  std::optional<Eigen::Index> p;  ///< default: every non-trivial eigenvector (rank - 1)
  std::vector<double> epsilon_grid;
  std::vector<Method> methods = all_methods();
  std::vector<std::uint64_t> seeds{0};
  ClassifierOptions classifier;
};

struct ClassificationRun {
  Method method = Method::exact;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  Eigen::Index correct = 0;
  Eigen::Index n_test = 0;
  double c = 0.0;
  double cv_accuracy = 0.0;
  double wall_ms = 0.0;
  std::string error;

  [[nodiscard]] bool ok() const { return error.empty(); }
  [[nodiscard]] double misclassification() const {
    return 1.0 - static_cast<double>(correct) / static_cast<double>(n_test);
  }
};

struct ClassificationOutcome {
  std::vector<ClassificationRun> runs;  ///< one per (epsilon, method, seed)
  std::map<std::pair<Method, std::uint64_t>, GridSearchResult> best;

  ExperimentReport report;

  /// Test-set correct count at the selected bandwidth.
  [[nodiscard]] Eigen::Index best_correct(Method method, std::uint64_t seed) const;
};

/// Builds the kernel on train and test rows together, embeds with each
/// method, fits the classifier on the training rows only and counts correct
/// test predictions; repeated over the bandwidth grid. The exact method does
/// not depend on the seed and runs once per bandwidth.
ClassificationOutcome run_classification(const PointCloud& train, const PointCloud& test,
                                         const ClassificationConfig& config);

}  // namespace specapprox
