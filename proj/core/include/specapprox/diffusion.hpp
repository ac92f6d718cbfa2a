#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "specapprox/spectral.hpp"

namespace specapprox {

/// Diffusion-map coordinates: eigenvector columns 2..p+1 of a decomposition.
struct Embedding {
  Matrix coords;
  Method source_method = Method::exact;

  [[nodiscard]] Eigen::Index dim() const { return coords.cols(); }
  [[nodiscard]] Eigen::Index size() const { return coords.rows(); }
};

/// Drops the leading (trivial) eigenvector and keeps the next p, unscaled.
Embedding diffusion_embed(const SpectralDecomposition& dec, Eigen::Index p);

/// Header `c1,...,cp[,label]`, one row per observation.
void write_embedding_csv(const Embedding& embedding, const std::filesystem::path& path,
                         const std::optional<std::vector<int>>& labels = std::nullopt);

}  // namespace specapprox
