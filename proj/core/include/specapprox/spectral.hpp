#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "specapprox/graph_kernel.hpp"

namespace specapprox {

enum class Method { exact, nystrom_uniform, nystrom_weighted, gaussian_projection };

std::string_view to_string(Method method);
/// Accepts the enum spelling ("nystrom_uniform") and the CLI spelling
/// ("nystrom-uniform", "gp").
Method parse_method(std::string_view text);

/// Eigenpairs of a symmetric matrix, exact or approximate.
///
/// Eigenvalues are sorted in non-increasing order and column j of
/// `eigenvectors` pairs with eigenvalue j. Each column is sign-normalized so
/// that its entry of largest magnitude (lowest index on ties) is positive.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
  Method method = Method::exact;
  Eigen::Index m = 0;
  std::uint64_t seed = 0;
  std::optional<std::vector<Eigen::Index>> landmarks;

  [[nodiscard]] Eigen::Index rank() const { return eigenvalues.size(); }
  [[nodiscard]] Eigen::Index rows() const { return eigenvectors.rows(); }
};

enum class SamplingScheme { uniform, weighted };

/// Landmark index set for the Nystrom extension. Indices are zero-based,
/// distinct, and stored in ascending order.
struct LandmarkSample {
  std::vector<Eigen::Index> indices;
  SamplingScheme scheme = SamplingScheme::uniform;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultRankTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kMaxProjectionCondition = 1e12;
inline constexpr double kRangeRankThreshold = 1e-12;

/// Top-k eigenpairs (by algebraic value) of a dense symmetric matrix.
SpectralDecomposition exact_eig(const Matrix& w, Eigen::Index k);

/// Draws m distinct landmarks without replacement.
///
/// The uniform scheme only uses `weights.size()` as n. The weighted scheme
/// draws sequentially with probability proportional to the remaining weights,
/// renormalizing after every removal.
LandmarkSample sample_landmarks(std::span<const double> weights, Eigen::Index m,
                                SamplingScheme scheme, std::uint64_t seed);

/// Nystrom extension of the eigenpairs of W restricted to the landmarks.
///
/// Pairs of the landmark submatrix whose eigenvalue magnitude is at most
/// rank_tolerance times the largest magnitude are dropped before extension.
SpectralDecomposition nystrom(const Matrix& w, const LandmarkSample& sample,
                              double rank_tolerance = kDefaultRankTolerance);

/// Randomized range finder followed by the eigendecomposition of the
/// projected m x m problem. Output columns are orthonormal.
SpectralDecomposition gaussian_projection(const Matrix& w, Eigen::Index m, std::uint64_t seed);

/// ||W - U diag(lambda) U^T||_F.
double reconstruction_error(const Matrix& w, const SpectralDecomposition& dec);

/// ||U^T U - I||_F.
double orthonormality_defect(const Matrix& u);

/// In-place sign convention shared by every decomposition.
void normalize_signs(Matrix& vectors);

/// Eigenvalues file: '#'-prefixed metadata lines (method, m, seed, rank,
/// landmarks) followed by one eigenvalue per line. Eigenvectors file: one
/// comma-separated row per observation. Values use round-trip precision.
void write_decomposition_csv(const SpectralDecomposition& dec,
                             const std::filesystem::path& eigenvalues_path,
                             const std::filesystem::path& eigenvectors_path);

SpectralDecomposition read_decomposition_csv(const std::filesystem::path& eigenvalues_path,
                                             const std::filesystem::path& eigenvectors_path);

}  // namespace specapprox
