#include "strataug/estimators.hpp"

#include <cmath>
#include <memory>

#include "strataug/errors.hpp"

namespace strataug {

AugmentationFn zero_augmentation() {
  AugmentationFn b;
  b.tag = AugmentationTag::zero;
  return b;
}

PointEstimate empirical_estimate(const TrialDataset& dataset, const LinkSpec& link) {
  const double ybar1 = dataset.arm_mean(1);
  const double ybar0 = dataset.arm_mean(0);
  PointEstimate est;
  est.method = "emp";
  est.mu1_hat = ybar1;
  est.mu0_hat = ybar0;
  est.delta_hat = link.g(ybar1) - link.g(ybar0);
  if (link.at_boundary(ybar1) || link.at_boundary(ybar0)) {
    est.warnings.push_back("arm mean at link boundary; clamped");
  }
  return est;
}

double psi_hat(const SubjectRecord& record, double ybar1, double ybar0, double pi,
               const LinkSpec& link) {
  if (record.assignment == 1) {
    return link.g_prime(ybar1) * (record.outcome - ybar1) / pi;
  }
  return -link.g_prime(ybar0) * (record.outcome - ybar0) / (1.0 - pi);
}

Eigen::VectorXd psi_hat_values(const TrialDataset& dataset, const LinkSpec& link) {
  const double ybar1 = dataset.arm_mean(1);
  const double ybar0 = dataset.arm_mean(0);
  const double g1 = link.g_prime(ybar1);
  const double g0 = link.g_prime(ybar0);
  const double pi = dataset.pi;
  Eigen::VectorXd psi(dataset.n());
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    psi(i) = dataset.assignment(i) == 1
                 ? g1 * (dataset.outcome(i) - ybar1) / pi
                 : -g0 * (dataset.outcome(i) - ybar0) / (1.0 - pi);
  }
  return psi;
}

Eigen::VectorXd augmentation_values(const TrialDataset& dataset, const AugmentationFn& b) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(dataset.n());
  if (b.eval) {
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
      values(i) = b.eval(dataset.covariates.row(i).transpose(), dataset.strata(i));
    }
  }
  return values;
}

PointEstimate augmented_estimate_values(const TrialDataset& dataset, double pi,
                                        const Eigen::VectorXd& b_values, const LinkSpec& link) {
  if (!(pi > 0.0 && pi < 1.0)) throw EstimationError("pi must lie in (0, 1)");
  PointEstimate est = empirical_estimate(dataset, link);
  est.method = "aug";
  double term = 0.0;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    term += (dataset.assignment(i) - pi) * b_values(i);
  }
  est.delta_hat -= term / static_cast<double>(dataset.n());
  return est;
}

PointEstimate augmented_estimate(const TrialDataset& dataset, double pi,
                                 const AugmentationFn& b, const LinkSpec& link) {
  return augmented_estimate_values(dataset, pi, augmentation_values(dataset, b), link);
}

AugmentationFn plugin_b_opt(const OutcomeModel& m1, const OutcomeModel& m0,
                            const TrialDataset& dataset, double pi, const LinkSpec& link) {
  const double ybar1 = dataset.arm_mean(1);
  const double ybar0 = dataset.arm_mean(0);
  const double scale1 = link.g_prime(ybar1) / pi;
  const double scale0 = link.g_prime(ybar0) / (1.0 - pi);
  auto predict1 = m1.predict_one;
  auto predict0 = m0.predict_one;
  AugmentationFn b;
  b.tag = AugmentationTag::plugin_bopt;
  b.eval = [=](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
    return scale1 * (predict1(w) - ybar1) + scale0 * (predict0(w) - ybar0);
  };
  return b;
}

DesignSpec design_empty() {
  DesignSpec d;
  d.v_dim = 0;
  d.v = [](const Eigen::Ref<const Eigen::VectorXd>&, int) { return Eigen::VectorXd(0); };
  d.name = "";
  return d;
}

DesignSpec design_stratum_dummies(int n_strata) {
  DesignSpec d;
  d.v_dim = n_strata - 1;
  d.v = [n_strata](const Eigen::Ref<const Eigen::VectorXd>&, int stratum) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_strata - 1);
    if (stratum >= 2) v(stratum - 2) = 1.0;
    return v;
  };
  d.name = "S";
  return d;
}

DesignSpec design_covariates(int p) {
  DesignSpec d;
  d.v_dim = p;
  d.v = [](const Eigen::Ref<const Eigen::VectorXd>& w, int) { return Eigen::VectorXd(w); };
  d.name = "W";
  return d;
}

DesignSpec design_covariates_and_dummies(int p, int n_strata) {
  DesignSpec d;
  d.v_dim = p + n_strata - 1;
  d.v = [n_strata](const Eigen::Ref<const Eigen::VectorXd>& w, int stratum) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(w.size() + n_strata - 1);
    v.head(w.size()) = w;
    if (stratum >= 2) v(w.size() + stratum - 2) = 1.0;
    return v;
  };
  d.name = "W+S";
  return d;
}

namespace {

Eigen::VectorXd regression_row(const DesignSpec& design,
                               const Eigen::Ref<const Eigen::VectorXd>& w, int stratum,
                               double a) {
  const Eigen::VectorXd v = design.v(w, stratum);
  const Eigen::Index q = v.size();
  Eigen::VectorXd row(2 + 2 * q);
  row(0) = 1.0;
  row(1) = a;
  row.segment(2, q) = v;
  row.segment(2 + q, q) = a * v;
  return row;
}

}  // namespace

RegressionEstimate regression_estimate(const TrialDataset& dataset, const DesignSpec& design,
                                       const LinkSpec& link) {
  if (dataset.arm_count(1) == 0 || dataset.arm_count(0) == 0) {
    throw EstimationError("an arm is empty");
  }
  const Eigen::Index n = dataset.n();
  Eigen::MatrixXd X(n, 2 + 2 * design.v_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = regression_row(design, dataset.covariates.row(i).transpose(),
                              dataset.strata(i), dataset.assignment(i))
                   .transpose();
  }

  RegressionEstimate result;
  if (link.kind == LinkKind::logit) {
    result.fit = fit_glm_irls(X, dataset.outcome, link);
  } else {
    result.fit = fit_ols(X, dataset.outcome);
  }

  // standardize: average both counterfactual predictions over the sample
  double sum1 = 0.0, sum0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto w = dataset.covariates.row(i).transpose();
    const int s = dataset.strata(i);
    sum1 += link.g_inv(regression_row(design, w, s, 1.0).dot(result.fit.beta));
    sum0 += link.g_inv(regression_row(design, w, s, 0.0).dot(result.fit.beta));
  }
  result.mu_reg1 = sum1 / static_cast<double>(n);
  result.mu_reg0 = sum0 / static_cast<double>(n);
  result.point.method = "reg";
  result.point.mu1_hat = result.mu_reg1;
  result.point.mu0_hat = result.mu_reg0;
  result.point.delta_hat = link.g(result.mu_reg1) - link.g(result.mu_reg0);
  if (link.at_boundary(result.mu_reg1) || link.at_boundary(result.mu_reg0)) {
    result.point.warnings.push_back("standardized mean at link boundary; clamped");
  }
  return result;
}

AugmentationFn regression_b_reg(const RegressionEstimate& estimate, const DesignSpec& design,
                                const TrialDataset& dataset, double pi, const LinkSpec& link) {
  (void)dataset;
  const double mu1 = estimate.mu_reg1;
  const double mu0 = estimate.mu_reg0;
  const double scale1 = link.g_prime(mu1) / pi;
  const double scale0 = link.g_prime(mu0) / (1.0 - pi);
  const Eigen::VectorXd beta = estimate.fit.beta;
  AugmentationFn b;
  b.tag = AugmentationTag::regression_breg;
  b.eval = [=](const Eigen::Ref<const Eigen::VectorXd>& w, int stratum) {
    const double h1 = link.g_inv(regression_row(design, w, stratum, 1.0).dot(beta));
    const double h0 = link.g_inv(regression_row(design, w, stratum, 0.0).dot(beta));
    return scale1 * (h1 - mu1) + scale0 * (h0 - mu0);
  };
  return b;
}

CalibrationTable calibrate_values(const TrialDataset& dataset, const Eigen::VectorXd& b_values,
                                  double pi, const LinkSpec& link) {
  (void)pi;
  const int K = dataset.n_strata;
  const Eigen::VectorXd psi = psi_hat_values(dataset, link);
  Eigen::VectorXd psi_treated = Eigen::VectorXd::Zero(K), psi_control = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd b_sum = Eigen::VectorXd::Zero(K);
  Eigen::VectorXi n_treated = Eigen::VectorXi::Zero(K), n_control = Eigen::VectorXi::Zero(K);
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    const int k = dataset.strata(i) - 1;
    b_sum(k) += b_values(i);
    if (dataset.assignment(i) == 1) {
      psi_treated(k) += psi(i);
      n_treated(k) += 1;
    } else {
      psi_control(k) += psi(i);
      n_control(k) += 1;
    }
  }
  CalibrationTable table;
  table.constants = Eigen::VectorXd::Zero(K);
  table.n_treated = n_treated;
  table.n_control = n_control;
  for (int k = 0; k < K; ++k) {
    const int n_k = n_treated(k) + n_control(k);
    if (n_k == 0) continue;  // stratum absent from the data: keep 0 silently
    if (n_treated(k) == 0 || n_control(k) == 0) {
      table.empty_arm_strata += 1;
      continue;
    }
    table.constants(k) = psi_treated(k) / n_treated(k) - psi_control(k) / n_control(k) -
                         b_sum(k) / n_k;
  }
  return table;
}

CalibrationTable calibrate(const TrialDataset& dataset, const AugmentationFn& b_hat, double pi,
                           const LinkSpec& link) {
  return calibrate_values(dataset, augmentation_values(dataset, b_hat), pi, link);
}

AugmentationFn calibrated_augmentation(const AugmentationFn& base, CalibrationTable table) {
  auto shared = std::make_shared<CalibrationTable>(std::move(table));
  auto base_eval = base.eval;
  AugmentationFn b;
  b.tag = AugmentationTag::calibrated;
  b.eval = [shared, base_eval](const Eigen::Ref<const Eigen::VectorXd>& w, int stratum) {
    const double base_value = base_eval ? base_eval(w, stratum) : 0.0;
    return base_value + shared->at(stratum);
  };
  return b;
}

PointEstimate calibrated_estimate(const TrialDataset& dataset, double pi,
                                  const AugmentationFn& b_hat, const LinkSpec& link) {
  const Eigen::VectorXd b_values = augmentation_values(dataset, b_hat);
  const CalibrationTable table = calibrate_values(dataset, b_values, pi, link);
  Eigen::VectorXd shifted = b_values;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) shifted(i) += table.at(dataset.strata(i));
  PointEstimate est = augmented_estimate_values(dataset, pi, shifted, link);
  est.method = "aug_cal";
  if (table.empty_arm_strata > 0) {
    est.warnings.push_back(std::to_string(table.empty_arm_strata) +
                           " strata had an empty arm; calibration constant set to 0");
  }
  return est;
}

}  // namespace strataug
