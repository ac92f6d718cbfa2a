#include "specapprox/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "specapprox/errors.hpp"

namespace specapprox {

namespace {

void check_columns(const SpectralDecomposition& exact, const SpectralDecomposition& approx,
                   Eigen::Index first, Eigen::Index count, bool approx_needs_columns) {
  if (exact.rows() != approx.rows()) {
    throw InputError("alignment: decompositions have " + std::to_string(exact.rows()) + " and " +
                     std::to_string(approx.rows()) + " rows");
  }
  if (first < 0 || count < 1 || first + count > exact.eigenvectors.cols() ||
      (approx_needs_columns && first + count > approx.eigenvectors.cols())) {
    throw InputError("alignment: requested columns are not present in both decompositions");
  }
}

AlignmentReport finish(std::vector<Eigen::Index> columns, std::vector<double> scores) {
  AlignmentReport r;
  r.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  r.columns = std::move(columns);
  r.scores = std::move(scores);
  return r;
}

}  // namespace

AlignmentReport alignment(const SpectralDecomposition& exact, const SpectralDecomposition& approx,
                          Eigen::Index first, Eigen::Index count) {
  check_columns(exact, approx, first, count, true);
  std::vector<Eigen::Index> cols;
  std::vector<double> scores;
  for (Eigen::Index j = first; j < first + count; ++j) {
    const auto a = exact.eigenvectors.col(j);
    const auto b = approx.eigenvectors.col(j);
    const double denom = a.norm() * b.norm();
    const double score = denom > 0.0 ? std::abs(a.dot(b)) / denom : 0.0;
    cols.push_back(j);
    scores.push_back(std::min(1.0, score));
  }
  return finish(std::move(cols), std::move(scores));
}

AlignmentReport subspace_capture(const SpectralDecomposition& exact, const SpectralDecomposition& approx,
                                 Eigen::Index first, Eigen::Index count) {
  check_columns(exact, approx, first, count, false);
  Eigen::HouseholderQR<Matrix> qr(approx.eigenvectors);
  const Matrix basis = qr.householderQ() * Matrix::Identity(approx.rows(), approx.eigenvectors.cols());
  std::vector<Eigen::Index> cols;
  std::vector<double> scores;
  for (Eigen::Index j = first; j < first + count; ++j) {
    const auto a = exact.eigenvectors.col(j);
    const double total = a.squaredNorm();
    const double inside = (basis.transpose() * a).squaredNorm();
    cols.push_back(j);
    scores.push_back(total > 0.0 ? std::min(1.0, inside / total) : 0.0);
  }
  return finish(std::move(cols), std::move(scores));
}

double threshold_cluster_accuracy(std::span<const double> coords, std::span<const int> labels) {
  if (coords.size() != labels.size() || coords.empty()) {
    throw InputError("threshold_cluster_accuracy: coordinate and label lengths differ");
  }
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() != 2) {
    throw InputError("threshold_cluster_accuracy: need exactly two classes, found " +
                     std::to_string(classes.size()));
  }

  const std::size_t n = coords.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return coords[i] < coords[j]; });

  std::size_t total_first = 0;
  for (int l : labels) total_first += (l == classes[0]);

  // Orientation A: class 0 below the cut. Correct = firsts below + seconds above.
  std::size_t firsts_below = 0;
  std::size_t best = std::max(total_first, n - total_first);  // cut at either end
  for (std::size_t k = 1; k < n; ++k) {
    firsts_below += (labels[order[k - 1]] == classes[0]);
    if (!(coords[order[k - 1]] < coords[order[k]])) continue;
    const std::size_t seconds_above = (n - k) - (total_first - firsts_below);
    const std::size_t a = firsts_below + seconds_above;
    best = std::max({best, a, n - a});
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

double two_means_accuracy(const Matrix& coords, std::span<const int> labels, int max_iterations) {
  const Eigen::Index n = coords.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n || n < 2) {
    throw InputError("two_means_accuracy: coordinate and label lengths differ");
  }
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() != 2) throw InputError("two_means_accuracy: need exactly two classes");

  // Seed with the extremes of the first coordinate.
  Eigen::Index lo = 0, hi = 0;
  coords.col(0).minCoeff(&lo);
  coords.col(0).maxCoeff(&hi);
  Matrix centers(2, coords.cols());
  centers.row(0) = coords.row(lo);
  centers.row(1) = coords.row(hi);

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d0 = (coords.row(i) - centers.row(0)).squaredNorm();
      const double d1 = (coords.row(i) - centers.row(1)).squaredNorm();
      const int a = d1 < d0 ? 1 : 0;
      if (assign[static_cast<std::size_t>(i)] != a) {
        assign[static_cast<std::size_t>(i)] = a;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(2, coords.cols());
    Eigen::Index counts[2] = {0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = assign[static_cast<std::size_t>(i)];
      sums.row(a) += coords.row(i);
      ++counts[a];
    }
    for (int c = 0; c < 2; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
    }
  }

  std::size_t agree = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    agree += (labels[static_cast<std::size_t>(i)] == classes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]);
  }
  const auto nn = static_cast<std::size_t>(n);
  return static_cast<double>(std::max(agree, nn - agree)) / static_cast<double>(n);
}

Eigen::Index cost_matched_m(Eigen::Index n, Eigen::Index m_gp) {
  const double raw = std::sqrt(static_cast<double>(n) * static_cast<double>(m_gp));
  const auto rounded = static_cast<Eigen::Index>(std::llround(raw));
  return std::clamp<Eigen::Index>(rounded, 1, std::max<Eigen::Index>(1, n));
}

}  // namespace specapprox
