#include "specapprox/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "specapprox/datasets.hpp"
#include "specapprox/errors.hpp"

namespace specapprox {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<int> binary_labels_or_empty(const PointCloud& cloud) {
  if (!cloud.labels) return {};
  std::set<int> distinct(cloud.labels->begin(), cloud.labels->end());
  if (distinct.size() != 2) return {};
  return *cloud.labels;
}

ReportRow make_row(const std::string& task, Method method, Eigen::Index n, Eigen::Index m, double epsilon,
                   std::uint64_t seed, std::string metric, double value, double wall_ms) {
  return ReportRow{task, std::string(to_string(method)), static_cast<std::int64_t>(n),
                   static_cast<std::int64_t>(m), epsilon, seed, std::move(metric), value, wall_ms};
}

}  // namespace

std::vector<Method> all_methods() {
  return {Method::exact, Method::nystrom_uniform, Method::nystrom_weighted, Method::gaussian_projection};
}

SpectralDecomposition decompose(const KernelMatrix& kernel, Method method, Eigen::Index rank,
                                std::uint64_t seed) {
  const Matrix& w = kernel.normalized;
  switch (method) {
    case Method::exact:
      return exact_eig(w, rank);
    case Method::nystrom_uniform:
    case Method::nystrom_weighted: {
      const Vector diag = w.diagonal();
      const auto scheme = method == Method::nystrom_uniform ? SamplingScheme::uniform : SamplingScheme::weighted;
      const auto sample = sample_landmarks(std::span<const double>(diag.data(), static_cast<std::size_t>(diag.size())),
                                           rank, scheme, seed);
      return nystrom(w, sample);
    }
    case Method::gaussian_projection:
      return gaussian_projection(w, rank, seed);
  }
  throw ParameterError("decompose: unknown method");
}

GridSearchResult epsilon_grid_search(std::span<const double> grid,
                                     const std::function<double(double)>& misclassification_at) {
  if (grid.empty()) throw ParameterError("epsilon grid is empty");
  GridSearchResult result;
  bool found = false;
  std::string failures;
  for (double eps : grid) {
    GridPoint point;
    point.epsilon = eps;
    try {
      point.misclassification = misclassification_at(eps);
    } catch (const std::exception& e) {
      point.error = e.what();
      failures += "\n  epsilon " + std::to_string(eps) + ": " + point.error;
    }
    if (point.misclassification) {
      const double err = *point.misclassification;
      if (!found || err < result.best_misclassification ||
          (err == result.best_misclassification && eps < result.best_epsilon)) {
        result.best_epsilon = eps;
        result.best_misclassification = err;
        found = true;
      }
    }
    result.points.push_back(std::move(point));
  }
  if (!found) throw NumericalError("every epsilon in the grid failed:" + failures);
  return result;
}

const MethodRun& EmbeddingTaskOutcome::run(Method method) const {
  for (const auto& r : runs) {
    if (r.method == method) return r;
  }
  throw ParameterError("no run for method " + std::string(to_string(method)));
}

EmbeddingTaskOutcome run_embedding_task(const PointCloud& cloud, const EmbeddingTaskConfig& config) {
  cloud.validate();
  const Eigen::Index n = cloud.size();
  if (config.p < 1 || config.p + 1 > n) throw ParameterError("embedding dimension p must satisfy 1 <= p < n");
  const KernelMatrix kernel = build_kernel(cloud, config.epsilon);
  const auto labels = binary_labels_or_empty(cloud);

  std::vector<Method> methods = config.methods;
  const bool need_exact = config.with_reference &&
                          std::find(methods.begin(), methods.end(), Method::exact) == methods.end();
  if (need_exact) methods.insert(methods.begin(), Method::exact);

  EmbeddingTaskOutcome outcome;
  for (Method method : methods) {
    MethodRun run;
    run.method = method;
    Eigen::Index rank = config.p + 1;
    if (method == Method::gaussian_projection) rank = config.m_gp;
    if (method == Method::nystrom_uniform || method == Method::nystrom_weighted) rank = config.m_nys;

    const auto start = std::chrono::steady_clock::now();
    run.decomposition = decompose(kernel, method, rank, config.seed);
    run.embedding = diffusion_embed(run.decomposition, config.p);
    run.wall_ms = elapsed_ms(start);
    run.reconstruction_error = reconstruction_error(kernel.normalized, run.decomposition);
    if (!labels.empty()) {
      const auto first = run.embedding.coords.col(0);
      run.threshold_accuracy = threshold_cluster_accuracy(
          std::span<const double>(first.data(), static_cast<std::size_t>(first.size())), labels);
      run.two_means_accuracy = two_means_accuracy(run.embedding.coords, labels);
    }
    outcome.runs.push_back(std::move(run));
  }
  const SpectralDecomposition* reference = nullptr;
  for (const auto& r : outcome.runs) {
    if (r.method == Method::exact) reference = &r.decomposition;
  }

  for (auto& run : outcome.runs) {
    const Eigen::Index m = run.decomposition.m;
    const std::uint64_t seed = run.method == Method::exact ? 0 : config.seed;
    auto row = [&](std::string metric, double value) {
      outcome.report.add(make_row(config.task, run.method, n, m, config.epsilon, seed, std::move(metric), value, run.wall_ms));
    };
    if (reference && run.method != Method::exact) {
      run.alignment = alignment(*reference, run.decomposition, 1, config.p);
      run.capture = subspace_capture(*reference, run.decomposition, 1, config.p);
      row("alignment_mean", run.alignment->mean);
      row("subspace_capture_mean", run.capture->mean);
      for (std::size_t j = 0; j < run.alignment->scores.size(); ++j) {
        const auto col = std::to_string(run.alignment->columns[j] + 1);
        row("alignment_u" + col, run.alignment->scores[j]);
        row("subspace_capture_u" + col, run.capture->scores[j]);
      }
    }
    row("reconstruction_error", run.reconstruction_error);
    row("rank", static_cast<double>(run.decomposition.rank()));
    if (run.threshold_accuracy) row("threshold_accuracy", *run.threshold_accuracy);
    if (run.two_means_accuracy) row("two_means_accuracy", *run.two_means_accuracy);
  }
  outcome.report.sort();
  return outcome;
}

Eigen::Index ClassificationOutcome::best_correct(Method method, std::uint64_t seed) const {
  const auto key = std::make_pair(method, method == Method::exact ? std::uint64_t{0} : seed);
  const auto it = best.find(key);
  if (it == best.end()) throw ParameterError("no classification result for this method and seed");
  for (const auto& r : runs) {
    if (r.method == key.first && r.seed == key.second && r.epsilon == it->second.best_epsilon && r.ok()) {
      return r.correct;
    }
  }
  throw ParameterError("best bandwidth run missing");
}

ClassificationOutcome run_classification(const PointCloud& train, const PointCloud& test,
                                         const ClassificationConfig& config) {
  if (!train.labels || !test.labels) throw InputError("classification needs labeled train and test rows");
  if (config.epsilon_grid.empty()) throw ParameterError("epsilon grid is empty");
  if (config.methods.empty()) throw ParameterError("no methods requested");
  const PointCloud all = concatenate(train, test);
  all.validate();
  const Eigen::Index n = all.size();
  const Eigen::Index n_train = train.size();
  if (config.m < 2 || config.m > n) {
    throw ParameterError("m = " + std::to_string(config.m) + " must lie in [2, " + std::to_string(n) + "]");
  }
  if (config.p && (*config.p < 1 || *config.p + 1 > config.m)) {
    throw ParameterError("p must satisfy 1 <= p <= m - 1");
  }

  ClassificationOutcome outcome;
  auto classify = [&](const SpectralDecomposition& dec, ClassificationRun& run) {
    const Eigen::Index p = std::min(config.p.value_or(dec.rank() - 1), dec.rank() - 1);
    const Embedding emb = diffusion_embed(dec, p);
    const Matrix train_x = emb.coords.topRows(n_train);
    const Matrix test_x = emb.coords.bottomRows(n - n_train);
    const ClassifierModel model = train_classifier(train_x, *train.labels, config.classifier);
    run.correct = evaluate_classifier(model, test_x, *test.labels);
    run.n_test = test.size();
    run.c = model.c;
    const auto best_it = std::find(model.c_grid.begin(), model.c_grid.end(), model.c);
    run.cv_accuracy = model.cv_accuracy[static_cast<std::size_t>(best_it - model.c_grid.begin())];
  };

  for (double eps : config.epsilon_grid) {
    std::optional<KernelMatrix> kernel;
    std::string kernel_error;
    try {
      kernel = build_kernel(all, eps);
    } catch (const std::exception& e) {
      kernel_error = e.what();
    }
    for (Method method : config.methods) {
      const std::vector<std::uint64_t> seeds =
          method == Method::exact ? std::vector<std::uint64_t>{0} : config.seeds;
      for (std::uint64_t seed : seeds) {
        ClassificationRun run;
        run.method = method;
        run.seed = seed;
        run.epsilon = eps;
        run.n_test = test.size();
        const auto start = std::chrono::steady_clock::now();
        try {
          if (!kernel) throw NumericalError(kernel_error);
          classify(decompose(*kernel, method, config.m, seed), run);
        } catch (const std::exception& e) {
          run.error = e.what();
        }
        run.wall_ms = elapsed_ms(start);
        outcome.runs.push_back(std::move(run));
      }
    }
  }

  for (Method method : config.methods) {
    const std::vector<std::uint64_t> seeds =
        method == Method::exact ? std::vector<std::uint64_t>{0} : config.seeds;
    for (std::uint64_t seed : seeds) {
      auto lookup = [&](double eps) -> double {
        for (const auto& r : outcome.runs) {
          if (r.method == method && r.seed == seed && r.epsilon == eps) {
            if (!r.ok()) throw NumericalError(r.error);
            return r.misclassification();
          }
        }
        throw NumericalError("missing run");
      };
      outcome.best[{method, seed}] = epsilon_grid_search(config.epsilon_grid, lookup);
    }
  }

  for (const auto& r : outcome.runs) {
    if (!r.ok()) continue;
    auto row = [&](std::string metric, double value) {
      outcome.report.add(make_row(config.task, r.method, n, config.m, r.epsilon, r.seed, std::move(metric), value, r.wall_ms));
    };
    row("correct", static_cast<double>(r.correct));
    row("misclassification_rate", r.misclassification());
    row("svm_c", r.c);
    row("cv_accuracy", r.cv_accuracy);
  }
  for (const auto& [key, result] : outcome.best) {
    const Eigen::Index correct = outcome.best_correct(key.first, key.second);
    outcome.report.add(make_row(config.task, key.first, n, config.m, result.best_epsilon, key.second,
                                "best_correct", static_cast<double>(correct), 0.0));
    outcome.report.add(make_row(config.task, key.first, n, config.m, result.best_epsilon, key.second,
                                "best_misclassification_rate", result.best_misclassification, 0.0));
  }
  outcome.report.sort();
  return outcome;
}

}  // namespace specapprox
