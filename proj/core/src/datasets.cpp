#include "specapprox/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "specapprox/errors.hpp"
#include "specapprox/random.hpp"
#include "text_util.hpp"

namespace specapprox {

void FishbowlParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) throw ParameterError("fishbowl semi-axes must be positive");
  if (!(d >= 0.0) || !(d < std::numbers::pi)) throw ParameterError("fishbowl opening d must lie in [0, pi)");
  if (n < 2) throw ParameterError("fishbowl needs n >= 2 points");
}

Eigen::Vector3d fishbowl_point(double a, double b, double c, double u, double v) {
  return {a * std::cos(u) * std::sin(v), b * std::sin(u) * std::sin(v), c * std::cos(v)};
}

PointCloud fishbowl(const FishbowlParams& params) {
  params.validate();
  Rng rng(params.seed);
  PointCloud cloud;
  cloud.points.resize(params.n, 3);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(params.n);
  for (Eigen::Index i = 0; i < params.n; ++i) {
    const double u = step * static_cast<double>(i);
    const double v = params.d + (std::numbers::pi - params.d) * rng.uniform();
    cloud.points.row(i) = fishbowl_point(params.a, params.b, params.c, u, v).transpose();
  }
  return cloud;
}

void HaloBallParams::validate() const {
  bowl.validate();
  if (!(ring_fraction > 0.0) || !(ring_fraction < 1.0)) {
    throw ParameterError("ring_fraction must lie in (0, 1)");
  }
  if (n_ball < 0) throw ParameterError("n_ball must be non-negative");
  if (!(radius() > 0.0)) throw ParameterError("ball_radius must be positive");
}

double HaloBallParams::radius() const {
  return ball_radius.value_or(0.15 * std::min({bowl.a, bowl.b, bowl.c}));
}

PointCloud halo_ball(const HaloBallParams& params) {
  params.validate();
  const PointCloud bowl = fishbowl(params.bowl);
  const auto z = bowl.points.col(2);
  const double z_min = z.minCoeff();
  const double cut = z_min + params.ring_fraction * (z.maxCoeff() - z_min);

  std::vector<Eigen::Index> ring;
  for (Eigen::Index i = 0; i < bowl.size(); ++i) {
    if (z(i) >= cut) ring.push_back(i);
  }
  if (ring.empty()) throw ParameterError("halo_ball: no ring points left after the cut");

  const auto n_ring = static_cast<Eigen::Index>(ring.size());
  PointCloud out;
  out.points.resize(n_ring + params.n_ball, 3);
  out.labels.emplace();
  out.labels->reserve(static_cast<std::size_t>(n_ring + params.n_ball));
  Eigen::RowVector3d centroid = Eigen::RowVector3d::Zero();
  for (Eigen::Index r = 0; r < n_ring; ++r) {
    out.points.row(r) = bowl.points.row(ring[static_cast<std::size_t>(r)]);
    centroid += out.points.row(r);
    out.labels->push_back(kRingLabel);
  }
  centroid /= static_cast<double>(n_ring);

  Rng rng(params.seed);
  const double radius = params.radius();
  for (Eigen::Index i = 0; i < params.n_ball; ++i) {
    for (int k = 0; k < 3; ++k) out.points(n_ring + i, k) = centroid(k) + radius * rng.normal();
    out.labels->push_back(kBallLabel);
  }
  return out;
}

Split subsample(const PointCloud& cloud, Eigen::Index n_train, Eigen::Index n_test, std::uint64_t seed) {
  if (n_train < 0 || n_test < 0 || n_train + n_test > cloud.size()) {
    throw ParameterError("subsample: n_train + n_test = " + std::to_string(n_train + n_test) +
                         " exceeds the " + std::to_string(cloud.size()) + " available rows");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cloud.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  shuffle(order, rng);

  Split split;
  split.train_indices.assign(order.begin(), order.begin() + n_train);
  split.test_indices.assign(order.begin() + n_train, order.begin() + n_train + n_test);
  split.train = cloud.subset(split.train_indices);
  split.test = cloud.subset(split.test_indices);
  return split;
}

PointCloud concatenate(const PointCloud& first, const PointCloud& second) {
  if (first.dim() != second.dim()) throw InputError("concatenate: dimension mismatch");
  if (first.labels.has_value() != second.labels.has_value()) {
    throw InputError("concatenate: both clouds must be labeled or both unlabeled");
  }
  PointCloud out;
  out.points.resize(first.size() + second.size(), first.dim());
  out.points.topRows(first.size()) = first.points;
  out.points.bottomRows(second.size()) = second.points;
  if (first.labels) {
    out.labels = *first.labels;
    out.labels->insert(out.labels->end(), second.labels->begin(), second.labels->end());
  }
  return out;
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path, bool last_column_is_label) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<double> values;
  std::vector<int> labels;
  Eigen::Index columns = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (rows == 0 && columns < 0 && !detail::parse_double(fields.front())) continue;  // header

    const auto width = static_cast<Eigen::Index>(fields.size());
    if (columns < 0) columns = width;
    if (width != columns) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " fields, found " + std::to_string(width));
    }
    const std::size_t coord_count = fields.size() - (last_column_is_label ? 1 : 0);
    if (coord_count == 0) throw FormatError(path.string() + ": no coordinate columns");
    for (std::size_t k = 0; k < coord_count; ++k) {
      const auto v = detail::parse_double(fields[k]);
      if (!v) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          std::string(fields[k]) + "'");
      }
      values.push_back(*v);
    }
    if (last_column_is_label) {
      const auto label = detail::parse_int(fields.back());
      if (!label) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad label '" +
                          std::string(fields.back()) + "'");
      }
      labels.push_back(static_cast<int>(*label));
    }
    ++rows;
  }

  PointCloud cloud;
  const Eigen::Index dim = columns < 0 ? 0 : columns - (last_column_is_label ? 1 : 0);
  cloud.points = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, dim);
  if (last_column_is_label) cloud.labels = std::move(labels);
  cloud.validate();
  return cloud;
}

void write_point_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (Eigen::Index j = 0; j < cloud.dim(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  if (cloud.labels) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
      if (j) out << ',';
      out << detail::format_double(cloud.points(i, j));
    }
    if (cloud.labels) out << ',' << (*cloud.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace specapprox
