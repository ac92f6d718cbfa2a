#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <vector>

#include "specapprox/graph_kernel.hpp"

namespace specapprox {

/// Ellipsoid "fishbowl": semi-axes (a, b, c) and opening angle d in [0, pi).
struct FishbowlParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 0.35 * std::numbers::pi;
  Eigen::Index n = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// (a cos u sin v, b sin u sin v, c cos v).
Eigen::Vector3d fishbowl_point(double a, double b, double c, double u, double v);

/// u_i = 2 pi i / n on a regular grid, v_i uniform on [d, pi].
PointCloud fishbowl(const FishbowlParams& params);

/// Fishbowl with its bottom cut away (the ring, label 2) and a Gaussian
/// glob at the ring's centroid (the ball, label 1).
struct HaloBallParams {
  FishbowlParams bowl{.n = 2600};
  double ring_fraction = 0.2;  ///< share of the bowl's z-range removed from the bottom
  Eigen::Index n_ball = 400;
  std::optional<double> ball_radius;  ///< per-axis std. dev.; default 0.15 min(a, b, c)
  std::uint64_t seed = 0;             ///< ball draws; the ring uses bowl.seed

  void validate() const;
  [[nodiscard]] double radius() const;
};

inline constexpr int kBallLabel = 1;
inline constexpr int kRingLabel = 2;

/// Ring points first (in bowl order), then ball points.
PointCloud halo_ball(const HaloBallParams& params);

/// Disjoint train/test rows drawn uniformly without replacement.
struct Split {
  PointCloud train;
  PointCloud test;
  std::vector<Eigen::Index> train_indices;
  std::vector<Eigen::Index> test_indices;
};

Split subsample(const PointCloud& cloud, Eigen::Index n_train, Eigen::Index n_test, std::uint64_t seed);

/// Rows of `first` followed by rows of `second`.
PointCloud concatenate(const PointCloud& first, const PointCloud& second);

/// CSV point clouds: one observation per row. A header row is detected when
/// its first field is not numeric. With `last_column_is_label` the final
/// column is parsed as an integer label.
PointCloud read_point_cloud_csv(const std::filesystem::path& path, bool last_column_is_label);
void write_point_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// IDX binary files (MNIST container format). All integers are big-endian;
// gzip-compressed files are recognised by their 0x1f 0x8b prefix.

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols bytes, row-major per image

  [[nodiscard]] std::size_t count() const {
    const std::size_t per = static_cast<std::size_t>(rows) * cols;
    return per ? pixels.size() / per : 0;
  }
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);
void write_idx_images(const std::filesystem::path& path, const IdxImages& images, bool gzip = false);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels,
                      bool gzip = false);

/// Images flattened to d = rows * cols coordinates with labels attached.
/// Pixels are divided by 255 unless `rescale` is false.
PointCloud load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path, bool rescale = true);

}  // namespace specapprox
