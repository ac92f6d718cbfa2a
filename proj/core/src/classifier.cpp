#include "specapprox/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "specapprox/errors.hpp"
#include "specapprox/random.hpp"

namespace specapprox {

namespace {

std::vector<int> distinct_classes(std::span<const int> labels) {
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

// Dual coordinate descent for the L1-loss (hinge) linear SVM with shrinking.
// `xt` holds one augmented sample per column (last row is the constant bias
// feature); `alpha` is the warm start and receives the final dual variables.
Vector solve_binary(const Matrix& xt, const Vector& q_diag, std::span<const signed char> y, double c,
                    Vector& alpha, const ClassifierOptions& options, Rng& rng) {
  const Eigen::Index n = xt.cols();
  Vector w = Vector::Zero(xt.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    alpha(i) = std::min(alpha(i), c);
    if (alpha(i) != 0.0) w.noalias() += (alpha(i) * y[static_cast<std::size_t>(i)]) * xt.col(i);
  }

  std::vector<Eigen::Index> index(static_cast<std::size_t>(n));
  std::iota(index.begin(), index.end(), Eigen::Index{0});
  std::size_t active = index.size();
  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf;
  double pg_min_old = -inf;

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    for (std::size_t i = active; i > 1; --i) {
      std::swap(index[i - 1], index[static_cast<std::size_t>(rng.index(i))]);
    }
    double pg_max = -inf;
    double pg_min = inf;
    for (std::size_t s = 0; s < active;) {
      const Eigen::Index i = index[s];
      const double yi = y[static_cast<std::size_t>(i)];
      const double g = yi * w.dot(xt.col(i)) - 1.0;
      double pg = 0.0;
      if (alpha(i) == 0.0) {
        if (g > pg_max_old) {
          std::swap(index[s], index[--active]);
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha(i) == c) {
        if (g < pg_min_old) {
          std::swap(index[s], index[--active]);
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(i);
        alpha(i) = std::clamp(old - g / q_diag(i), 0.0, c);
        w.noalias() += ((alpha(i) - old) * yi) * xt.col(i);
      }
      ++s;
    }

    if (pg_max - pg_min <= options.tolerance) {
      if (active == index.size()) break;
      // Converged on the shrunk set: re-check every variable before stopping.
      active = index.size();
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
  }
  return w;
}

struct Prepared {
  Matrix xt;  // (p + 1) x n, standardized, bias row last
  Vector q_diag;
  Vector mean;
  Vector scale;
};

Prepared prepare(const Matrix& features, bool standardize) {
  Prepared out;
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  out.mean = Vector::Zero(p);
  out.scale = Vector::Ones(p);
  if (standardize && n > 0) {
    out.mean = features.colwise().mean().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
      const double var = (features.col(j).array() - out.mean(j)).square().sum() / static_cast<double>(n);
      out.scale(j) = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    }
  }
  out.xt.resize(p + 1, n);
  out.xt.topRows(p) = ((features.rowwise() - out.mean.transpose()) * out.scale.asDiagonal()).transpose();
  out.xt.row(p).setOnes();
  out.q_diag = out.xt.colwise().squaredNorm().transpose();
  return out;
}

void check_training_input(const Matrix& features, std::span<const int> labels) {
  if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw InputError("classifier: " + std::to_string(features.rows()) + " feature rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (features.cols() < 1) throw InputError("classifier: no feature columns");
  if (!features.allFinite()) throw InputError("classifier: non-finite feature value");
  if (distinct_classes(labels).size() < 2) {
    throw InputError("classifier: training labels contain a single class");
  }
}

// Fits all one-vs-rest problems on the given rows of a prepared design,
// warm-starting from (and updating) `alphas` (one column per class).
Matrix fit_prepared(const Prepared& prep, std::span<const int> labels, const std::vector<int>& classes,
                    double c, Matrix& alphas, const ClassifierOptions& options) {
  const Eigen::Index n = prep.xt.cols();
  const auto k = static_cast<Eigen::Index>(classes.size());
  Matrix w(prep.xt.rows(), k);
  std::vector<signed char> y(static_cast<std::size_t>(n));
  for (Eigen::Index cls = 0; cls < k; ++cls) {
    for (Eigen::Index i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == classes[static_cast<std::size_t>(cls)] ? 1 : -1;
    }
    Rng rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(cls + 1));
    Vector alpha = alphas.col(cls);
    w.col(cls) = solve_binary(prep.xt, prep.q_diag, y, c, alpha, options, rng);
    alphas.col(cls) = alpha;
  }
  return w;
}

ClassifierModel assemble(const Prepared& prep, const std::vector<int>& classes, const Matrix& w, double c) {
  ClassifierModel model;
  const Eigen::Index p = prep.xt.rows() - 1;
  model.classes = classes;
  model.weights = w.topRows(p);
  model.bias = w.row(p).transpose();
  model.feature_mean = prep.mean;
  model.feature_scale = prep.scale;
  model.c = c;
  return model;
}

}  // namespace

std::vector<double> default_c_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

Matrix ClassifierModel::scores(const Matrix& features) const {
  if (features.cols() != weights.rows()) {
    throw InputError("classifier: model expects " + std::to_string(weights.rows()) +
                     " features, got " + std::to_string(features.cols()));
  }
  const Matrix standardized = (features.rowwise() - feature_mean.transpose()) * feature_scale.asDiagonal();
  Matrix s = standardized * weights;
  s.rowwise() += bias.transpose();
  return s;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ParameterError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > labels.size()) {
    throw FoldError("cannot form " + std::to_string(folds) + " folds from " +
                    std::to_string(labels.size()) + " rows");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, rows] : by_class) {
    if (rows.size() < 2) {
      throw FoldError("class " + std::to_string(cls) + " has a single row; some training fold would miss it");
    }
  }
  Rng rng(seed);
  std::vector<int> fold(labels.size(), 0);
  std::size_t next = 0;
  for (auto& [cls, rows] : by_class) {
    shuffle(rows, rng);
    for (std::size_t r : rows) fold[r] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
  }
  return fold;
}

ClassifierModel fit_linear_svm(const Matrix& features, std::span<const int> labels, double c,
                               const ClassifierOptions& options) {
  check_training_input(features, labels);
  if (!(c > 0.0)) throw ParameterError("classifier: C must be positive");
  const auto classes = distinct_classes(labels);
  const Prepared prep = prepare(features, options.standardize);
  Matrix alphas = Matrix::Zero(features.rows(), static_cast<Eigen::Index>(classes.size()));
  const Matrix w = fit_prepared(prep, labels, classes, c, alphas, options);
  return assemble(prep, classes, w, c);
}

ClassifierModel train_classifier(const Matrix& features, std::span<const int> labels,
                                 const ClassifierOptions& options) {
  check_training_input(features, labels);
  if (options.c_grid.empty()) throw ParameterError("classifier: empty C grid");
  std::vector<double> grid = options.c_grid;
  if (!std::is_sorted(grid.begin(), grid.end()) || !(grid.front() > 0.0)) {
    throw ParameterError("classifier: C grid must be positive and ascending");
  }
  const auto classes = distinct_classes(labels);
  const auto fold_of = stratified_folds(labels, options.folds, options.seed);

  std::vector<double> accuracy(grid.size(), 0.0);
  for (int f = 0; f < options.folds; ++f) {
    std::vector<Eigen::Index> train_rows, held_rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      (fold_of[i] == f ? held_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
    }
    Matrix train_x(static_cast<Eigen::Index>(train_rows.size()), features.cols());
    std::vector<int> train_y;
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      train_x.row(static_cast<Eigen::Index>(r)) = features.row(train_rows[r]);
      train_y.push_back(labels[static_cast<std::size_t>(train_rows[r])]);
    }
    Matrix held_x(static_cast<Eigen::Index>(held_rows.size()), features.cols());
    std::vector<int> held_y;
    for (std::size_t r = 0; r < held_rows.size(); ++r) {
      held_x.row(static_cast<Eigen::Index>(r)) = features.row(held_rows[r]);
      held_y.push_back(labels[static_cast<std::size_t>(held_rows[r])]);
    }

    const Prepared prep = prepare(train_x, options.standardize);
    Matrix alphas = Matrix::Zero(train_x.rows(), static_cast<Eigen::Index>(classes.size()));
    // Ascending C keeps the previous duals feasible, so each fit warm-starts.
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Matrix w = fit_prepared(prep, train_y, classes, grid[g], alphas, options);
      const ClassifierModel model = assemble(prep, classes, w, grid[g]);
      accuracy[g] += static_cast<double>(evaluate_classifier(model, held_x, held_y)) /
                     static_cast<double>(held_rows.size());
    }
  }
  for (double& a : accuracy) a /= static_cast<double>(options.folds);

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (accuracy[g] > accuracy[best]) best = g;
  }
  ClassifierModel model = fit_linear_svm(features, labels, grid[best], options);
  model.folds = options.folds;
  model.cv_accuracy = std::move(accuracy);
  model.c_grid = std::move(grid);
  return model;
}

std::vector<int> predict(const ClassifierModel& model, const Matrix& features) {
  const Matrix s = model.scores(features);
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < s.cols(); ++k) {
      if (s(i, k) > s(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

Eigen::Index evaluate_classifier(const ClassifierModel& model, const Matrix& features,
                                 std::span<const int> labels) {
  if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw InputError("evaluate_classifier: feature rows and labels differ in length");
  }
  const auto predicted = predict(model, features);
  Eigen::Index correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += (predicted[i] == labels[i]);
  return correct;
}

}  // namespace specapprox
