#include "specapprox/graph_kernel.hpp"

#include <cmath>
#include <string>

#include "specapprox/errors.hpp"

namespace specapprox {

void PointCloud::validate() const {
  if (points.rows() < 2) {
    throw InputError("point cloud needs at least 2 observations, got " +
                     std::to_string(points.rows()));
  }
  if (points.cols() < 1) throw InputError("point cloud has zero dimensions");
  if (!points.allFinite()) throw InputError("point cloud has a non-finite coordinate");
  if (labels && static_cast<Eigen::Index>(labels->size()) != points.rows()) {
    throw InputError("label count " + std::to_string(labels->size()) +
                     " does not match point count " + std::to_string(points.rows()));
  }
}

PointCloud PointCloud::subset(const std::vector<Eigen::Index>& indices) const {
  PointCloud out;
  out.points.resize(static_cast<Eigen::Index>(indices.size()), points.cols());
  if (labels) out.labels.emplace();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = indices[r];
    if (i < 0 || i >= points.rows()) throw ParameterError("subset index out of range");
    out.points.row(static_cast<Eigen::Index>(r)) = points.row(i);
    if (labels) out.labels->push_back((*labels)[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix pairwise_affinity(const PointCloud& cloud, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("bandwidth epsilon must be positive and finite");
  }
  cloud.validate();

  // Columns of `xt` are observations, so each difference is a contiguous read.
  const Matrix xt = cloud.points.transpose();
  const Eigen::Index n = xt.cols();
  Matrix w(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    w(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double d2 = (xt.col(i) - xt.col(j)).squaredNorm();
      const double value = std::exp(-d2 / epsilon);
      w(i, j) = value;
      w(j, i) = value;
    }
  }
  return w;
}

KernelMatrix normalize(Matrix raw, Normalization mode) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw InputError("affinity matrix must be square and non-empty");
  }
  if ((raw.array() < 0.0).any()) throw InputError("affinity matrix has a negative entry");

  KernelMatrix k;
  k.mode = mode;
  k.degree = raw.rowwise().sum();
  for (Eigen::Index i = 0; i < k.degree.size(); ++i) {
    if (!(k.degree(i) > 0.0)) {
      throw DegenerateGraphError("row " + std::to_string(i) + " of the affinity matrix sums to zero");
    }
  }

  if (mode == Normalization::symmetric) {
    const Vector scale = k.degree.array().rsqrt();
    k.normalized = scale.asDiagonal() * raw * scale.asDiagonal();
    // The product is symmetric in exact arithmetic; make it bitwise so.
    const Eigen::Index n = raw.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j + 1; i < n; ++i) k.normalized(j, i) = k.normalized(i, j);
    }
  } else {
    k.normalized = k.degree.cwiseInverse().asDiagonal() * raw;
  }
  k.raw = std::move(raw);
  return k;
}

KernelMatrix build_kernel(const PointCloud& cloud, double epsilon, Normalization mode) {
  KernelMatrix k = normalize(pairwise_affinity(cloud, epsilon), mode);
  k.epsilon = epsilon;
  return k;
}

Matrix laplacian(const KernelMatrix& kernel) {
  const Eigen::Index n = kernel.normalized.rows();
  return Matrix::Identity(n, n) - kernel.normalized;
}

}  // namespace specapprox
