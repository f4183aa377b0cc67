#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "strataug/cart.hpp"
#include "strataug/dataset.hpp"
#include "strataug/rng.hpp"

namespace strataug {

enum class LearnerKind { ols, ols_interactions, additive_basis, cart, super_learner };

const char* to_string(LearnerKind kind);

struct LearnerOptions {
  LearnerKind kind = LearnerKind::super_learner;
  OutcomeType outcome = OutcomeType::continuous;
  CartParams cart{};
  int sl_folds = 5;
  std::vector<LearnerKind> sl_library = {LearnerKind::ols, LearnerKind::ols_interactions,
                                         LearnerKind::additive_basis, LearnerKind::cart};
};

// A fitted predictor of E[Y | W]. For binary outcomes the parametric members
// are fitted by logistic regression and predictions are clamped to [0, 1].
struct OutcomeModel {
  LearnerKind kind = LearnerKind::ols;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> predict_one;

  // super learner only
  Eigen::VectorXd ensemble_weights;            // nonnegative, sums to 1
  std::vector<LearnerKind> ensemble_members;   // members retained after drops
  double ensemble_cv_risk = 0.0;
  Eigen::VectorXd member_cv_risks;

  std::vector<std::string> warnings;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& w) const { return predict_one(w); }
  Eigen::VectorXd predict_matrix(const Eigen::MatrixXd& W) const;
};

// min ||Z w - y||^2 over the probability simplex, solved exactly by
// enumerating support subsets (intended for a handful of columns).
Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y);

// Shuffled, nearly equal-sized fold labels in 0..folds-1.
std::vector<int> assign_folds(Eigen::Index n, int folds, Rng& rng);
// Fold labels balanced within each treatment arm.
std::vector<int> assign_folds_by_arm(const Eigen::VectorXi& assignment, int folds, Rng& rng);

OutcomeModel fit_cart(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const CartParams& params);
OutcomeModel fit_additive_basis(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                OutcomeType outcome);
OutcomeModel fit_super_learner(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LearnerOptions& options, Rng& rng);
OutcomeModel fit_outcome_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LearnerOptions& options, Rng& rng);

// Independent fits of E[Y | W, A = a] on the two arm subsamples; returns
// (arm-1 model, arm-0 model).
std::pair<OutcomeModel, OutcomeModel> fit_arm_models(const TrialDataset& dataset,
                                                     const LearnerOptions& options, Rng& rng);

}  // namespace strataug
