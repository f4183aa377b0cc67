#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "strataug/dataset.hpp"
#include "strataug/learners.hpp"
#include "strataug/linear_model.hpp"
#include "strataug/link.hpp"

namespace strataug {

enum class AugmentationTag { zero, plugin_bopt, regression_breg, custom, calibrated };

// A real-valued function of the covariates used to augment the empirical
// estimator. The stratum label rides along so calibrated variants can add
// their per-stratum constant without re-deriving S from W.
struct AugmentationFn {
  AugmentationTag tag = AugmentationTag::zero;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, int)> eval;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& w, int stratum) const {
    return eval ? eval(w, stratum) : 0.0;
  }
};

AugmentationFn zero_augmentation();

// Per-stratum calibration constants c_1..c_K; strata with an empty arm get 0
// and are counted in empty_arm_strata.
struct CalibrationTable {
  Eigen::VectorXd constants;
  Eigen::VectorXi n_treated;
  Eigen::VectorXi n_control;
  int empty_arm_strata = 0;

  double at(int stratum) const { return constants(stratum - 1); }
};

struct PointEstimate {
  double delta_hat = 0.0;
  double mu1_hat = 0.0;
  double mu0_hat = 0.0;
  std::string method;
  std::vector<std::string> warnings;
};

// delta =  g(mean Y | A=1) - g(mean Y | A=0)
PointEstimate empirical_estimate(const TrialDataset& dataset, const LinkSpec& link);

// g'(ybar1) A (Y - ybar1) / pi - g'(ybar0) (1 - A) (Y - ybar0) / (1 - pi)
double psi_hat(const SubjectRecord& record, double ybar1, double ybar0, double pi,
               const LinkSpec& link);
// per-subject psi values with arm means taken from the data
Eigen::VectorXd psi_hat_values(const TrialDataset& dataset, const LinkSpec& link);

// per-subject evaluations of b
Eigen::VectorXd augmentation_values(const TrialDataset& dataset, const AugmentationFn& b);

// empirical estimate minus the sample mean of (A - pi) b(W)
PointEstimate augmented_estimate(const TrialDataset& dataset, double pi,
                                 const AugmentationFn& b, const LinkSpec& link);
PointEstimate augmented_estimate_values(const TrialDataset& dataset, double pi,
                                        const Eigen::VectorXd& b_values, const LinkSpec& link);

// plug-in estimate of the variance-minimizing augmentation, built from fitted
// arm models and the arm means of the observed outcomes
AugmentationFn plugin_b_opt(const OutcomeModel& m1, const OutcomeModel& m0,
                            const TrialDataset& dataset, double pi, const LinkSpec& link);

// V(W) builder for the outcome regression; the full regressor row is
// (1, A, V', A V').
struct DesignSpec {
  int v_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&, int)> v;
  bool include_treatment_interactions = true;
  std::string name;
};

DesignSpec design_empty();
DesignSpec design_stratum_dummies(int n_strata);
DesignSpec design_covariates(int p);
DesignSpec design_covariates_and_dummies(int p, int n_strata);

struct RegressionEstimate {
  PointEstimate point;
  CoefficientFit fit;
  double mu_reg1 = 0.0;
  double mu_reg0 = 0.0;
};

// G-computation: fit the outcome model by OLS (identity) or IRLS (logit),
// then standardize both counterfactual means over the full sample.
RegressionEstimate regression_estimate(const TrialDataset& dataset, const DesignSpec& design,
                                       const LinkSpec& link);

// Influence-equivalent augmentation of the regression estimator.
AugmentationFn regression_b_reg(const RegressionEstimate& estimate, const DesignSpec& design,
                                const TrialDataset& dataset, double pi, const LinkSpec& link);

// c_k = mean psi (treated, stratum k) - mean psi (control, stratum k)
//       - mean b (stratum k)
CalibrationTable calibrate(const TrialDataset& dataset, const AugmentationFn& b_hat, double pi,
                           const LinkSpec& link);
CalibrationTable calibrate_values(const TrialDataset& dataset, const Eigen::VectorXd& b_values,
                                  double pi, const LinkSpec& link);

AugmentationFn calibrated_augmentation(const AugmentationFn& base, CalibrationTable table);

// augmented estimator at b_hat + c(S)
PointEstimate calibrated_estimate(const TrialDataset& dataset, double pi,
                                  const AugmentationFn& b_hat, const LinkSpec& link);

}  // namespace strataug
