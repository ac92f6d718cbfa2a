#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "specapprox/datasets.hpp"
#include "specapprox/errors.hpp"
#include "specapprox/pipeline.hpp"

using namespace specapprox;

TEST(Decompose, RankMeaningPerMethod) {
  const auto kernel = build_kernel(fishbowl({.n = 150, .seed = 1}), 1.0);
  EXPECT_EQ(decompose(kernel, Method::exact, 7, 0).rank(), 7);
  EXPECT_EQ(decompose(kernel, Method::gaussian_projection, 12, 3).rank(), 12);
  const auto nys = decompose(kernel, Method::nystrom_weighted, 20, 3);
  EXPECT_EQ(nys.m, 20);
  EXPECT_EQ(nys.landmarks->size(), 20u);
  EXPECT_EQ(nys.method, Method::nystrom_weighted);
}

TEST(EmbeddingTask, ScoresEveryMethodAgainstExact) {
  EmbeddingTaskConfig config;
  config.epsilon = 1.0;
  config.m_nys = 60;
  config.m_gp = 10;
  config.methods = {Method::nystrom_uniform, Method::gaussian_projection};
  const auto outcome = run_embedding_task(fishbowl({.n = 300, .seed = 2}), config);
  ASSERT_EQ(outcome.runs.size(), 3u);
  EXPECT_EQ(outcome.runs[0].method, Method::exact);
  const auto& gp = outcome.run(Method::gaussian_projection);
  ASSERT_TRUE(gp.alignment.has_value());
  EXPECT_EQ(gp.alignment->columns, (std::vector<Eigen::Index>{1, 2}));
  EXPECT_EQ(gp.embedding.dim(), 2);
  EXPECT_FALSE(outcome.run(Method::exact).alignment.has_value());
  EXPECT_TRUE(outcome.report.find("manifold", "gaussian_projection", "subspace_capture_u2", 0).has_value());
  EXPECT_TRUE(outcome.report.find("manifold", "exact", "reconstruction_error", 0).has_value());
  EXPECT_THROW((void)outcome.run(Method::nystrom_weighted), ParameterError);
}

TEST(EmbeddingTask, TwoClassLabelsGetClusterMetrics) {
  HaloBallParams params;
  params.bowl.n = 400;
  params.n_ball = 80;
  EmbeddingTaskConfig config;
  config.task = "cluster";
  config.epsilon = 0.1;
  config.m_nys = 40;
  config.m_gp = 4;
  const auto outcome = run_embedding_task(halo_ball(params), config);
  for (const auto& run : outcome.runs) {
    ASSERT_TRUE(run.threshold_accuracy.has_value());
    EXPECT_GE(*run.threshold_accuracy, 0.5);
    EXPECT_LE(*run.threshold_accuracy, 1.0);
  }
  EXPECT_GE(*outcome.run(Method::exact).threshold_accuracy, 0.99);
}

TEST(EmbeddingTask, ReportIsReproducible) {
  EmbeddingTaskConfig config;
  config.epsilon = 2.0;
  config.m_nys = 30;
  config.seed = 5;
  const auto cloud = fishbowl({.n = 120, .seed = 5});
  const auto a = run_embedding_task(cloud, config).report.to_csv(false);
  const auto b = run_embedding_task(cloud, config).report.to_csv(false);
  EXPECT_EQ(a, b);
  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "task,method,n,m,epsilon,seed,metric_name,metric_value,wall_ms");
}

TEST(Classification, BlobsEndToEnd) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> noise(0.0, 0.3);
  const int per_class = 40;
  Matrix x(3 * per_class, 2);
  std::vector<int> y;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < per_class; ++i) {
      x(k * per_class + i, 0) = 3.0 * k + noise(gen);
      x(k * per_class + i, 1) = noise(gen);
      y.push_back(k);
    }
  }
  const auto split = subsample(PointCloud{x, y}, 90, 30, 1);

  ClassificationConfig config;
  config.m = 40;
  config.p = 6;
  config.epsilon_grid = {0.5, 2.0};
  config.seeds = {0, 1};
  config.classifier.folds = 3;
  const auto outcome = run_classification(split.train, split.test, config);
  // Exact once per bandwidth plus three approximations for two seeds each.
  EXPECT_EQ(outcome.runs.size(), 2u * (1 + 3 * 2));
  EXPECT_GE(outcome.best_correct(Method::exact, 0), 27);
  EXPECT_EQ(outcome.best_correct(Method::exact, 0), outcome.best_correct(Method::exact, 1));
  for (const auto& run : outcome.runs) EXPECT_TRUE(run.ok()) << run.error;
  EXPECT_TRUE(outcome.report.find("classify", "nystrom_uniform", "best_correct", 1).has_value());
}

TEST(Classification, RejectsBadConfig) {
  const PointCloud train{Matrix::Random(10, 2), std::vector<int>{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}};
  const PointCloud test{Matrix::Random(4, 2), std::vector<int>{0, 1, 0, 1}};
  ClassificationConfig config;
  config.epsilon_grid = {1.0};
  config.m = 20;
  EXPECT_THROW(run_classification(train, test, config), ParameterError);
  config.m = 5;
  config.p = 5;
  EXPECT_THROW(run_classification(train, test, config), ParameterError);
  config.p.reset();
  config.epsilon_grid.clear();
  EXPECT_THROW(run_classification(train, test, config), ParameterError);
  const PointCloud unlabeled{Matrix::Random(4, 2), std::nullopt};
  config.epsilon_grid = {1.0};
  EXPECT_THROW(run_classification(train, unlabeled, config), InputError);
}
