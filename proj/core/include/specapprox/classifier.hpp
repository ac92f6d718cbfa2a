#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specapprox/graph_kernel.hpp"

namespace specapprox {

/// Geometric grid 10^-3, 10^-2, ..., 10^3 of hinge-loss weights C.
std::vector<double> default_c_grid();

struct ClassifierOptions {
  int folds = 10;
  std::vector<double> c_grid = default_c_grid();
  int max_epochs = 1000;     ///< passes of dual coordinate descent per binary problem
  double tolerance = 0.1;    ///< projected-gradient spread at which a pass counts as converged
  bool standardize = true;   ///< z-score each feature column using training rows
  std::uint64_t seed = 0;    ///< fold assignment and coordinate order
};

/// One-vs-rest linear max-margin classifier.
///
/// Each binary problem minimizes 0.5 ||w||^2 + C sum_i max(0, 1 - y_i (w.x_i + b)),
/// with the bias folded into w through a constant feature. Scores are
/// features * weights + bias; the predicted class is the column of the
/// largest score (lowest class index on ties).
struct ClassifierModel {
  std::vector<int> classes;  ///< ascending; column k of weights scores classes[k]
  Matrix weights;            ///< p x K, in standardized feature units
  Vector bias;               ///< K
  Vector feature_mean;       ///< p
  Vector feature_scale;      ///< p
  double c = 1.0;
  int folds = 0;
  std::vector<double> cv_accuracy;  ///< one entry per grid value, same order as c_grid
  std::vector<double> c_grid;

  [[nodiscard]] Eigen::Index dim() const { return weights.rows(); }
  [[nodiscard]] Matrix scores(const Matrix& features) const;
};

/// Fits every one-vs-rest problem at a fixed C.
ClassifierModel fit_linear_svm(const Matrix& features, std::span<const int> labels, double c,
                               const ClassifierOptions& options = {});

/// Picks C from options.c_grid by stratified k-fold cross-validation (mean
/// fold accuracy; ties go to the smaller C) and refits on all rows.
ClassifierModel train_classifier(const Matrix& features, std::span<const int> labels,
                                 const ClassifierOptions& options = {});

std::vector<int> predict(const ClassifierModel& model, const Matrix& features);

/// Number of rows whose predicted class equals the label.
Eigen::Index evaluate_classifier(const ClassifierModel& model, const Matrix& features,
                                 std::span<const int> labels);

/// Fold id per row. Rows of each class are shuffled and dealt round-robin so
/// every training split keeps every class; throws FoldError when a class has
/// fewer than two rows or there are fewer rows than folds.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

}  // namespace specapprox
