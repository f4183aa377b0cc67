#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "strataug/cart.hpp"
#include "strataug/rng.hpp"
#include "strataug/scenarios.hpp"

using namespace strataug;

TEST_CASE("constant outcomes give a single leaf") {
  Eigen::MatrixXd X(10, 2);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(10, 3.25);
  CartTree tree;
  tree.fit(X, y, CartParams{});
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.predict(X.row(0).transpose()) == doctest::Approx(3.25));
}

TEST_CASE("a clean step function is split once at depth 1") {
  Eigen::MatrixXd X(20, 2);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = i < 10 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i;
    X(i, 1) = 0.37;  // non-informative
    y(i) = X(i, 0) > 0 ? 1.0 : 0.0;
  }
  CartParams params;
  params.max_depth = 1;
  params.min_leaf = 2;
  CartTree tree;
  tree.fit(X, y, params);
  CHECK(tree.leaf_count() == 2);
  Eigen::VectorXd probe(2);
  probe << -2.0, 0.37;
  CHECK(tree.predict(probe) == doctest::Approx(0.0));
  probe << 2.0, 0.37;
  CHECK(tree.predict(probe) == doctest::Approx(1.0));
}

namespace {

double training_mse(const CartTree& tree, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::VectorXd fitted = tree.predict_matrix(X);
  return (fitted - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("training MSE never exceeds the outcome variance") {
  // sample from the scenario-C arm-1 conditional mean
  Rng rng(99);
  const int n = 100;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = scenario_eta(Scenario::C, X.row(i).transpose(), 1) + rng.normal();
  }
  CartTree tree;
  tree.fit(X, y, CartParams{});
  const double variance = (y.array() - y.mean()).square().sum() / n;
  CHECK(training_mse(tree, X, y) <= variance + 1e-12);
}

TEST_CASE("training SSE is non-increasing in max_depth") {
  Rng rng(123);
  const int n = 300;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = scenario_eta(Scenario::D, X.row(i).transpose(), 0) + rng.normal();
  }
  double previous = std::numeric_limits<double>::infinity();
  for (int depth = 0; depth <= 8; ++depth) {
    CartParams params;
    params.max_depth = depth;
    params.min_leaf = 5;
    params.min_improvement = 0.0;
    CartTree tree;
    tree.fit(X, y, params);
    const double mse = training_mse(tree, X, y);
    CHECK(mse <= previous + 1e-12);
    previous = mse;
  }
}

TEST_CASE("prediction is deterministic") {
  Rng rng(5);
  Eigen::MatrixXd X(60, 3);
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = rng.normal();
  }
  CartTree a, b;
  a.fit(X, y, CartParams{});
  b.fit(X, y, CartParams{});
  const Eigen::VectorXd pa = a.predict_matrix(X);
  const Eigen::VectorXd pb = b.predict_matrix(X);
  CHECK((pa - pb).lpNorm<Eigen::Infinity>() == 0.0);
}
