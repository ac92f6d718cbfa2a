#include "specapprox/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <lapacke.h>

#include "specapprox/errors.hpp"
#include "specapprox/random.hpp"
#include "text_util.hpp"

namespace specapprox {

namespace {

void require_symmetric(const Matrix& w, const char* what) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw InputError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!w.allFinite()) throw InputError(std::string(what) + ": matrix has non-finite entries");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw InputError(std::string(what) + ": matrix is not symmetric (max |W - W^T| = " +
                     detail::format_double(asym) + ")");
  }
}

// Largest k eigenpairs of a symmetric matrix, descending. LAPACK dsyevr
// (MRRR) on the lower triangle.
void symmetric_top_eigenpairs(const Matrix& w, Eigen::Index k, Vector& values, Matrix& vectors) {
  const auto n = static_cast<lapack_int>(w.rows());
  const auto kk = static_cast<lapack_int>(k);
  Matrix a = w;
  Vector found_values(n);
  Matrix z(n, kk);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max(1, kk)));
  lapack_int found = 0;
  const char range = (kk == n) ? 'A' : 'I';
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', range, 'L', n, a.data(), n, 0.0, 0.0, n - kk + 1, n,
      LAPACKE_dlamch('S'), &found, found_values.data(), z.data(), n, support.data());
  if (info != 0 || found != kk) {
    throw NumericalError("symmetric eigensolver failed (dsyevr info = " + std::to_string(info) +
                         ", found " + std::to_string(found) + " of " + std::to_string(kk) + ")");
  }
  values.resize(kk);
  vectors.resize(n, kk);
  for (lapack_int j = 0; j < kk; ++j) {
    values(j) = found_values(kk - 1 - j);
    vectors.col(j) = z.col(kk - 1 - j);
  }
}

// Orthonormal basis whose span contains col(y), computed by classical
// Gram-Schmidt with one re-orthogonalization pass. Columns that are
// numerically dependent are replaced by random directions so Q keeps m
// columns.
Matrix orthonormal_range_basis(const Matrix& y, Rng& rng) {
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  Matrix q(n, m);
  const double scale = y.colwise().norm().maxCoeff();

  auto project_out = [&q](Vector& v, Eigen::Index cols) {
    if (cols == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeff = q.leftCols(cols).transpose() * v;
      v.noalias() -= q.leftCols(cols) * coeff;
    }
  };

  for (Eigen::Index j = 0; j < m; ++j) {
    Vector v = y.col(j);
    const double original = v.norm();
    project_out(v, j);
    double norm = v.norm();
    if (!(original > kRangeRankThreshold * scale) || !(norm > kRangeRankThreshold * original)) {
      do {
        for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
        project_out(v, j);
        norm = v.norm();
      } while (!(norm > 1e-3));
    }
    q.col(j) = v / norm;
  }
  return q;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::nystrom_uniform: return "nystrom_uniform";
    case Method::nystrom_weighted: return "nystrom_weighted";
    case Method::gaussian_projection: return "gaussian_projection";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "exact") return Method::exact;
  if (text == "nystrom_uniform" || text == "nystrom-uniform") return Method::nystrom_uniform;
  if (text == "nystrom_weighted" || text == "nystrom-weighted") return Method::nystrom_weighted;
  if (text == "gaussian_projection" || text == "gaussian-projection" || text == "gp") {
    return Method::gaussian_projection;
  }
  throw ParameterError("unknown method '" + std::string(text) + "'");
}

void normalize_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors.rows() > 0 && vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

SpectralDecomposition exact_eig(const Matrix& w, Eigen::Index k) {
  require_symmetric(w, "exact_eig");
  if (k < 1 || k > w.rows()) {
    throw ParameterError("exact_eig: k must lie in [1, n], got " + std::to_string(k));
  }
  SpectralDecomposition dec;
  symmetric_top_eigenpairs(w, k, dec.eigenvalues, dec.eigenvectors);
  normalize_signs(dec.eigenvectors);
  dec.method = Method::exact;
  dec.m = w.rows();
  dec.seed = 0;
  return dec;
}

LandmarkSample sample_landmarks(std::span<const double> weights, Eigen::Index m,
                                SamplingScheme scheme, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (m < 1 || m > n) {
    throw ParameterError("landmark count m = " + std::to_string(m) + " must lie in [1, " +
                         std::to_string(n) + "]");
  }
  LandmarkSample sample;
  sample.scheme = scheme;
  sample.seed = seed;
  Rng rng(seed);

  if (scheme == SamplingScheme::uniform) {
    // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto j = i + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    sample.indices.assign(pool.begin(), pool.begin() + m);
  } else {
    std::vector<double> remaining(weights.begin(), weights.end());
    Eigen::Index positive = 0;
    for (double x : remaining) {
      if (!std::isfinite(x) || x < 0.0) {
        throw InputError("landmark weights must be finite and non-negative");
      }
      if (x > 0.0) ++positive;
    }
    if (positive < m) {
      throw InputError("weighted sampling needs at least m = " + std::to_string(m) +
                       " positive weights, found " + std::to_string(positive));
    }
    for (Eigen::Index draw = 0; draw < m; ++draw) {
      const double total = std::accumulate(remaining.begin(), remaining.end(), 0.0);
      const double target = rng.uniform() * total;
      double running = 0.0;
      std::size_t chosen = remaining.size();
      std::size_t last_positive = remaining.size();
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (remaining[i] <= 0.0) continue;
        last_positive = i;
        running += remaining[i];
        if (target < running) {
          chosen = i;
          break;
        }
      }
      // Rounding can leave target just past the final partial sum.
      if (chosen == remaining.size()) chosen = last_positive;
      sample.indices.push_back(static_cast<Eigen::Index>(chosen));
      remaining[chosen] = 0.0;
    }
  }
  std::sort(sample.indices.begin(), sample.indices.end());
  return sample;
}

SpectralDecomposition nystrom(const Matrix& w, const LandmarkSample& sample, double rank_tolerance) {
  require_symmetric(w, "nystrom");
  const Eigen::Index n = w.rows();
  const auto m = static_cast<Eigen::Index>(sample.indices.size());
  if (m < 1 || m > n) throw ParameterError("nystrom: landmark count must lie in [1, n]");
  for (std::size_t i = 0; i < sample.indices.size(); ++i) {
    const auto idx = sample.indices[i];
    if (idx < 0 || idx >= n) throw ParameterError("nystrom: landmark index out of range");
    if (i > 0 && idx <= sample.indices[i - 1]) {
      throw ParameterError("nystrom: landmark indices must be distinct and ascending");
    }
  }

  Matrix cross(n, m);  // W_{N,M}
  for (Eigen::Index j = 0; j < m; ++j) cross.col(j) = w.col(sample.indices[static_cast<std::size_t>(j)]);
  Matrix block(m, m);  // W_{M,M}
  for (Eigen::Index i = 0; i < m; ++i) block.row(i) = cross.row(sample.indices[static_cast<std::size_t>(i)]);

  Vector small_values;
  Matrix small_vectors;
  symmetric_top_eigenpairs(block, m, small_values, small_vectors);

  const double largest = small_values.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(small_values(i)) > rank_tolerance * largest) kept.push_back(i);
  }
  if (kept.empty()) {
    throw DegenerateSubmatrixError("nystrom: every landmark eigenvalue is below the rank tolerance");
  }

  const auto k = static_cast<Eigen::Index>(kept.size());
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  Matrix selected(m, k);
  Vector inverse(k);
  SpectralDecomposition dec;
  dec.eigenvalues.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto i = kept[static_cast<std::size_t>(c)];
    dec.eigenvalues(c) = (nd / md) * small_values(i);
    selected.col(c) = small_vectors.col(i);
    inverse(c) = std::sqrt(md / nd) / small_values(i);
  }
  dec.eigenvectors.noalias() = cross * selected;
  dec.eigenvectors *= inverse.asDiagonal();
  normalize_signs(dec.eigenvectors);
  dec.method = sample.scheme == SamplingScheme::uniform ? Method::nystrom_uniform
                                                        : Method::nystrom_weighted;
  dec.m = m;
  dec.seed = sample.seed;
  dec.landmarks = sample.indices;
  return dec;
}

SpectralDecomposition gaussian_projection(const Matrix& w, Eigen::Index m, std::uint64_t seed) {
  require_symmetric(w, "gaussian_projection");
  const Eigen::Index n = w.rows();
  if (m < 1 || m > n) {
    throw ParameterError("gaussian_projection: m = " + std::to_string(m) + " must lie in [1, " +
                         std::to_string(n) + "]");
  }

  Rng rng(seed);
  Matrix omega(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = rng.normal();
  }
  Matrix y;
  y.noalias() = w * omega;
  const Matrix q = orthonormal_range_basis(y, rng);

  // B minimizes ||B (Q^T Omega) - Q^T Y||: solve (Q^T Omega)^T B^T = (Q^T Y)^T.
  Matrix projected_omega;
  projected_omega.noalias() = q.transpose() * omega;
  Matrix projected_y;
  projected_y.noalias() = q.transpose() * y;
  const Matrix lhs = projected_omega.transpose();

  Eigen::ColPivHouseholderQR<Matrix> pivoted(lhs);
  const Vector r_diag = pivoted.matrixQR().diagonal().cwiseAbs();
  const double condition = r_diag.minCoeff() > 0.0 ? r_diag.maxCoeff() / r_diag.minCoeff()
                                                   : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxProjectionCondition)) {
    throw NumericalError("gaussian_projection: Q^T Omega is numerically rank-deficient "
                         "(condition estimate " + detail::format_double(condition) +
                         "); retry with a different seed or a larger m");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lhs);
  Matrix b = cod.solve(Matrix(projected_y.transpose())).transpose();
  b = 0.5 * (b + b.transpose()).eval();

  Vector values;
  Matrix small_vectors;
  symmetric_top_eigenpairs(b, m, values, small_vectors);

  SpectralDecomposition dec;
  dec.eigenvalues = std::move(values);
  dec.eigenvectors.noalias() = q * small_vectors;
  normalize_signs(dec.eigenvectors);
  dec.method = Method::gaussian_projection;
  dec.m = m;
  dec.seed = seed;
  return dec;
}

double reconstruction_error(const Matrix& w, const SpectralDecomposition& dec) {
  if (w.rows() != w.cols()) throw InputError("reconstruction_error: W must be square");
  if (dec.eigenvectors.rows() != w.rows() || dec.eigenvectors.cols() != dec.eigenvalues.size()) {
    throw InputError("reconstruction_error: decomposition shape does not match W");
  }
  Matrix approx;
  approx.noalias() = dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
  return (w - approx).norm();
}

double orthonormality_defect(const Matrix& u) {
  Matrix gram;
  gram.noalias() = u.transpose() * u;
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

void write_decomposition_csv(const SpectralDecomposition& dec,
                             const std::filesystem::path& eigenvalues_path,
                             const std::filesystem::path& eigenvectors_path) {
  std::ofstream values_out(eigenvalues_path);
  if (!values_out) throw IoError("cannot open " + eigenvalues_path.string() + " for writing");
  values_out << "# method=" << to_string(dec.method) << '\n';
  values_out << "# m=" << dec.m << '\n';
  values_out << "# seed=" << dec.seed << '\n';
  values_out << "# rank=" << dec.rank() << '\n';
  if (dec.landmarks) {
    values_out << "# landmarks=";
    for (std::size_t i = 0; i < dec.landmarks->size(); ++i) {
      values_out << (i ? ";" : "") << (*dec.landmarks)[i];
    }
    values_out << '\n';
  }
  values_out << "eigenvalue\n";
  for (Eigen::Index i = 0; i < dec.rank(); ++i) values_out << detail::format_double(dec.eigenvalues(i)) << '\n';
  if (!values_out) throw IoError("write failed: " + eigenvalues_path.string());

  std::ofstream vectors_out(eigenvectors_path);
  if (!vectors_out) throw IoError("cannot open " + eigenvectors_path.string() + " for writing");
  for (Eigen::Index i = 0; i < dec.eigenvectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < dec.eigenvectors.cols(); ++j) {
      if (j) vectors_out << ',';
      vectors_out << detail::format_double(dec.eigenvectors(i, j));
    }
    vectors_out << '\n';
  }
  if (!vectors_out) throw IoError("write failed: " + eigenvectors_path.string());
}

SpectralDecomposition read_decomposition_csv(const std::filesystem::path& eigenvalues_path,
                                             const std::filesystem::path& eigenvectors_path) {
  std::ifstream values_in(eigenvalues_path);
  if (!values_in) throw IoError("cannot open " + eigenvalues_path.string());
  SpectralDecomposition dec;
  std::vector<double> values;
  std::string line;
  while (std::getline(values_in, line)) {
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto body = detail::trim(text.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const auto value = body.substr(eq + 1);
      if (key == "method") {
        dec.method = parse_method(value);
      } else if (key == "m") {
        dec.m = detail::parse_int(value).value_or(0);
      } else if (key == "seed") {
        std::uint64_t s = 0;
        std::from_chars(value.data(), value.data() + value.size(), s);
        dec.seed = s;
      } else if (key == "landmarks") {
        std::vector<Eigen::Index> idx;
        for (auto part : detail::split(value, ';')) {
          const auto parsed = detail::parse_int(part);
          if (!parsed) throw FormatError("bad landmark index in " + eigenvalues_path.string());
          idx.push_back(static_cast<Eigen::Index>(*parsed));
        }
        dec.landmarks = std::move(idx);
      }
      continue;
    }
    if (text == "eigenvalue") continue;
    const auto parsed = detail::parse_double(text);
    if (!parsed) throw FormatError("bad eigenvalue '" + std::string(text) + "' in " + eigenvalues_path.string());
    values.push_back(*parsed);
  }
  dec.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));

  std::ifstream vectors_in(eigenvectors_path);
  if (!vectors_in) throw IoError("cannot open " + eigenvectors_path.string());
  std::vector<double> entries;
  Eigen::Index rows = 0;
  while (std::getline(vectors_in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != dec.rank()) {
      throw FormatError("eigenvector row " + std::to_string(rows) + " has " +
                        std::to_string(fields.size()) + " fields, expected " + std::to_string(dec.rank()));
    }
    for (auto f : fields) {
      const auto parsed = detail::parse_double(f);
      if (!parsed) throw FormatError("bad eigenvector entry in " + eigenvectors_path.string());
      entries.push_back(*parsed);
    }
    ++rows;
  }
  dec.eigenvectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      entries.data(), rows, dec.rank());
  return dec;
}

}  // namespace specapprox
