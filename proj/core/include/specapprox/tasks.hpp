#pragma once

#include <span>
#include <vector>

#include "specapprox/spectral.hpp"

namespace specapprox {

/// Per-column |cos| between matching exact and approximate eigenvectors.
struct AlignmentReport {
  std::vector<Eigen::Index> columns;
  std::vector<double> scores;
  double mean = 0.0;
};

/// Scores columns [first, first + count) of both decompositions.
AlignmentReport alignment(const SpectralDecomposition& exact, const SpectralDecomposition& approx,
                          Eigen::Index first, Eigen::Index count);

/// Fraction of the squared norm of each exact column [first, first + count)
/// that lies in the span of all approximate eigenvectors.
AlignmentReport subspace_capture(const SpectralDecomposition& exact, const SpectralDecomposition& approx,
                                 Eigen::Index first, Eigen::Index count);

/// Best accuracy of a single threshold on a 1-D coordinate separating two
/// classes, over every cut position and both orientations. Cuts only fall
/// between distinct coordinate values.
double threshold_cluster_accuracy(std::span<const double> coords, std::span<const int> labels);

/// Accuracy of a deterministic 2-means clustering of the rows of `coords`
/// under the better of the two cluster-to-class assignments.
double two_means_accuracy(const Matrix& coords, std::span<const int> labels, int max_iterations = 100);

/// round(sqrt(n * m_gp)) clamped to [1, n]: the Nystrom rank whose O(n m^2)
/// cost matches Gaussian projection's O(n^2 m_gp).
Eigen::Index cost_matched_m(Eigen::Index n, Eigen::Index m_gp);

}  // namespace specapprox
