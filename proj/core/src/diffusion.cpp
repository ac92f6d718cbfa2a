#include "specapprox/diffusion.hpp"

#include <fstream>
#include <string>

#include "specapprox/errors.hpp"
#include "text_util.hpp"

namespace specapprox {

Embedding diffusion_embed(const SpectralDecomposition& dec, Eigen::Index p) {
  if (p < 1 || p + 1 > dec.rank()) {
    throw ParameterError("diffusion_embed: p = " + std::to_string(p) + " needs p + 1 <= " +
                         std::to_string(dec.rank()) + " eigenpairs");
  }
  Embedding e;
  e.coords = dec.eigenvectors.middleCols(1, p);
  e.source_method = dec.method;
  return e;
}

void write_embedding_csv(const Embedding& embedding, const std::filesystem::path& path,
                         const std::optional<std::vector<int>>& labels) {
  if (labels && static_cast<Eigen::Index>(labels->size()) != embedding.size()) {
    throw InputError("write_embedding_csv: label count does not match embedding rows");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (Eigen::Index j = 0; j < embedding.dim(); ++j) out << (j ? "," : "") << 'c' << (j + 1);
  if (labels) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < embedding.size(); ++i) {
    for (Eigen::Index j = 0; j < embedding.dim(); ++j) {
      if (j) out << ',';
      out << detail::format_double(embedding.coords(i, j));
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace specapprox
