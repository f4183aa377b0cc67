#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "strataug/estimators.hpp"

namespace strataug {

struct VarianceEstimate {
  double sigma2_hat = 0.0;  // scaled asymptotic variance
  double se = 0.0;          // sqrt(sigma2_hat / n)
  bool corrected_for_stratification = false;
  bool cross_validated = false;
};

// (1/n) sum [psi_hat - (A - pi) {b_hat(W) + c(S)}]^2; the calibration table is
// optional and marks the estimate as corrected for stratification.
VarianceEstimate if_variance(const TrialDataset& dataset, double pi, const AugmentationFn& b_hat,
                             const LinkSpec& link,
                             const CalibrationTable* calibration = nullptr);
VarianceEstimate if_variance_values(const TrialDataset& dataset, double pi,
                                    const Eigen::VectorXd& b_values, const LinkSpec& link,
                                    const CalibrationTable* calibration = nullptr);

// Out-of-fold plug-in augmentation values: for each fold, arm models are
// fitted on the complement and evaluated on the held-out subjects.
Eigen::VectorXd cross_fit_b_values(const TrialDataset& dataset, double pi,
                                   const LearnerOptions& learner, const LinkSpec& link,
                                   int folds, Rng& rng);

// Influence-function variance on cross-fitted augmentation values, removing
// the re-substitution bias of machine-learned b_hat.
VarianceEstimate cross_fit_variance(const TrialDataset& dataset, double pi,
                                    const LearnerOptions& learner, const LinkSpec& link,
                                    int folds, Rng& rng, bool calibrated = false);

// standard normal quantile, absolute error below 1e-9
double normal_quantile(double p);

std::pair<double, double> wald_interval(double delta_hat, double se, double level);

struct EstimateReport {
  PointEstimate point;
  VarianceEstimate uncorrected;
  VarianceEstimate corrected;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
};

}  // namespace strataug
