#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specapprox/classifier.hpp"
#include "specapprox/errors.hpp"
#include "specapprox/pipeline.hpp"

using namespace specapprox;

namespace {

struct Blobs {
  Matrix x;
  std::vector<int> y;
};

Blobs gaussian_blobs(const Matrix& centers, int per_class, double spread, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Blobs b;
  b.x.resize(centers.rows() * per_class, centers.cols());
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    for (int i = 0; i < per_class; ++i) {
      const Eigen::Index r = k * per_class + i;
      for (Eigen::Index j = 0; j < centers.cols(); ++j) b.x(r, j) = centers(k, j) + noise(gen);
      b.y.push_back(static_cast<int>(k) * 3 + 1);  // non-contiguous class ids
    }
  }
  return b;
}

}  // namespace

TEST(Classifier, SeparableTwoClassesFitExactly) {
  Matrix x(8, 2);
  x << -2, -1, -1, -2, -3, -1, -1.5, -1.5, 2, 1, 1, 2, 3, 1, 1.5, 1.5;
  const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  ClassifierOptions options;
  options.folds = 2;
  const auto model = train_classifier(x, y, options);
  EXPECT_EQ(evaluate_classifier(model, x, y), 8);
  EXPECT_EQ(model.dim(), 2);
  EXPECT_EQ(model.classes, (std::vector<int>{0, 1}));
  EXPECT_EQ(model.cv_accuracy.size(), default_c_grid().size());
}

TEST(Classifier, ThreeBlobsCrossValidateAboveNinetyFive) {
  Matrix centers(3, 2);
  centers << 0, 0, 6, 0, 0, 6;
  const auto blobs = gaussian_blobs(centers, 60, 1.0, 3);
  const auto model = train_classifier(blobs.x, blobs.y, {});
  const double best_cv = *std::max_element(model.cv_accuracy.begin(), model.cv_accuracy.end());
  EXPECT_GE(best_cv, 0.95);
  EXPECT_EQ(model.folds, 10);
  EXPECT_EQ(model.classes, (std::vector<int>{1, 4, 7}));
  const auto test = gaussian_blobs(centers, 100, 1.0, 4);
  EXPECT_GE(evaluate_classifier(model, test.x, test.y), 285);
}

TEST(Classifier, TiesPickStrongestRegularization) {
  Matrix centers(2, 2);
  centers << -10, 0, 10, 0;
  const auto blobs = gaussian_blobs(centers, 30, 0.5, 1);
  const auto model = train_classifier(blobs.x, blobs.y, {});
  // Every C separates these perfectly, so the smallest wins.
  EXPECT_EQ(model.c, default_c_grid().front());
}

TEST(Classifier, SingleClassAndBadInputs) {
  const Matrix x = oracle::random_points(10, 2, 1);
  EXPECT_THROW(train_classifier(x, std::vector<int>(10, 3), {}), InputError);
  EXPECT_THROW(train_classifier(x, std::vector<int>(9, 3), {}), InputError);
  ClassifierOptions one_fold;
  one_fold.folds = 1;
  std::vector<int> y(10, 0);
  std::fill(y.begin() + 5, y.end(), 1);
  EXPECT_THROW(train_classifier(x, y, one_fold), ParameterError);
  EXPECT_THROW(fit_linear_svm(x, y, 0.0, {}), ParameterError);
}

TEST(StratifiedFolds, BalancedAndErrors) {
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) y.push_back(i % 4);
  const auto folds = stratified_folds(y, 10, 2);
  for (int f = 0; f < 10; ++f) {
    for (int cls = 0; cls < 4; ++cls) {
      int count = 0;
      for (std::size_t i = 0; i < y.size(); ++i) count += folds[i] == f && y[i] == cls;
      EXPECT_GE(count, 2);
      EXPECT_LE(count, 3);
    }
  }
  EXPECT_THROW(stratified_folds(std::vector<int>{0, 0, 0, 1}, 2, 0), FoldError);
  EXPECT_THROW(stratified_folds(std::vector<int>{0, 1, 0, 1}, 5, 0), FoldError);
}

TEST(Classifier, ZeroWeightModelPredictsOneClass) {
  ClassifierModel model;
  model.classes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  model.weights = Matrix::Zero(3, 10);
  model.bias = Vector::Zero(10);
  model.feature_mean = Vector::Zero(3);
  model.feature_scale = Vector::Ones(3);
  std::vector<int> y;
  for (int i = 0; i < 500; ++i) y.push_back(i % 10);
  const Matrix x = oracle::random_points(500, 3, 2);
  // All scores tie, so every row goes to the lowest class index.
  EXPECT_EQ(evaluate_classifier(model, x, y), 50);
  const auto predicted = predict(model, x);
  EXPECT_TRUE(std::all_of(predicted.begin(), predicted.end(), [](int c) { return c == 0; }));
  EXPECT_THROW(evaluate_classifier(model, x, std::vector<int>(3, 0)), InputError);
  EXPECT_THROW(model.scores(Matrix::Zero(2, 4)), InputError);
}

TEST(Classifier, DeterministicWeights) {
  Matrix centers(3, 4);
  centers << 0, 0, 0, 0, 2, 0, 1, 0, 0, 2, 0, 1;
  const auto blobs = gaussian_blobs(centers, 40, 1.0, 8);
  const auto a = train_classifier(blobs.x, blobs.y, {});
  const auto b = train_classifier(blobs.x, blobs.y, {});
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.cv_accuracy, b.cv_accuracy);
}

TEST(Classifier, ArgmaxStableUnderPositiveScaling) {
  Matrix centers(4, 3);
  centers << 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1;
  const auto blobs = gaussian_blobs(centers, 30, 0.6, 12);
  auto model = fit_linear_svm(blobs.x, blobs.y, 1.0, {});
  const auto before = predict(model, blobs.x);
  for (double s : {1e-6, 0.5, 7.0, 1e6}) {
    ClassifierModel scaled = model;
    scaled.weights *= s;
    scaled.bias *= s;
    EXPECT_EQ(predict(scaled, blobs.x), before) << "scale " << s;
  }
}

TEST(GridSearch, SingletonAndStrictMinimum) {
  const std::vector<double> one{3.0};
  EXPECT_EQ(epsilon_grid_search(one, [](double) { return 0.4; }).best_epsilon, 3.0);

  const std::vector<double> grid{1.0, 2.0, 4.0, 8.0};
  const auto result = epsilon_grid_search(grid, [](double e) { return e == 4.0 ? 0.1 : 0.3; });
  EXPECT_EQ(result.best_epsilon, 4.0);
  EXPECT_EQ(result.best_misclassification, 0.1);
  EXPECT_EQ(result.points.size(), 4u);
}

TEST(GridSearch, TiesFavorSmallerEpsilonAndFailuresAreRecorded) {
  const std::vector<double> grid{8.0, 2.0, 4.0};
  const auto result = epsilon_grid_search(grid, [](double e) {
    if (e == 8.0) throw NumericalError("boom");
    return 0.2;
  });
  EXPECT_EQ(result.best_epsilon, 2.0);
  EXPECT_FALSE(result.points[0].misclassification.has_value());
  EXPECT_EQ(result.points[0].error, "boom");

  EXPECT_THROW(epsilon_grid_search(grid, [](double) -> double { throw NumericalError("all bad"); }),
               NumericalError);
  EXPECT_THROW(epsilon_grid_search(std::vector<double>{}, [](double) { return 0.0; }), ParameterError);
}
