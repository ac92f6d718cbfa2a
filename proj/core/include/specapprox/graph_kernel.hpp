#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace specapprox {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n observations in d dimensions, one per row, with optional integer labels.
struct PointCloud {
  Matrix points;
  std::optional<std::vector<int>> labels;

  [[nodiscard]] Eigen::Index size() const { return points.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return points.cols(); }

  /// Throws InputError unless n >= 2, d >= 1, every coordinate is finite and
  /// labels (if any) have length n.
  void validate() const;

  /// Rows selected by `indices`, labels carried along.
  [[nodiscard]] PointCloud subset(const std::vector<Eigen::Index>& indices) const;
};

enum class Normalization { symmetric, asymmetric };

/// Gaussian affinities of a point cloud and their degree normalization.
///
/// `raw` is the fully connected affinity matrix, `degree` its row sums and
/// `normalized` either D^{-1/2} raw D^{-1/2} (symmetric) or D^{-1} raw
/// (asymmetric, row-stochastic).
struct KernelMatrix {
  Matrix raw;
  Vector degree;
  Matrix normalized;
  Normalization mode = Normalization::symmetric;
  std::optional<double> epsilon;

  [[nodiscard]] Eigen::Index size() const { return raw.rows(); }
};

/// exp(-||x_i - x_j||^2 / epsilon) over every pair; symmetric by
/// construction with a unit diagonal.
Matrix pairwise_affinity(const PointCloud& cloud, double epsilon);

KernelMatrix normalize(Matrix raw, Normalization mode = Normalization::symmetric);

/// pairwise_affinity followed by normalize, recording the bandwidth.
KernelMatrix build_kernel(const PointCloud& cloud, double epsilon,
                          Normalization mode = Normalization::symmetric);

/// I - W.
Matrix laplacian(const KernelMatrix& kernel);

}  // namespace specapprox
