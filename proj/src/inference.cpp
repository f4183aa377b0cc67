#include "strataug/inference.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "strataug/errors.hpp"

namespace strataug {

VarianceEstimate if_variance_values(const TrialDataset& dataset, double pi,
                                    const Eigen::VectorXd& b_values, const LinkSpec& link,
                                    const CalibrationTable* calibration) {
  const Eigen::VectorXd psi = psi_hat_values(dataset, link);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    double b = b_values(i);
    if (calibration != nullptr) b += calibration->at(dataset.strata(i));
    const double value = psi(i) - (dataset.assignment(i) - pi) * b;
    sum += value * value;
  }
  VarianceEstimate est;
  est.sigma2_hat = sum / static_cast<double>(dataset.n());
  est.se = std::sqrt(est.sigma2_hat / static_cast<double>(dataset.n()));
  est.corrected_for_stratification = calibration != nullptr;
  return est;
}

VarianceEstimate if_variance(const TrialDataset& dataset, double pi, const AugmentationFn& b_hat,
                             const LinkSpec& link, const CalibrationTable* calibration) {
  return if_variance_values(dataset, pi, augmentation_values(dataset, b_hat), link, calibration);
}

Eigen::VectorXd cross_fit_b_values(const TrialDataset& dataset, double pi,
                                   const LearnerOptions& learner, const LinkSpec& link,
                                   int folds, Rng& rng) {
  if (folds < 2) throw EstimationError("cross-fitting needs at least 2 folds");
  const Eigen::Index n = dataset.n();
  const std::vector<int> fold_of = assign_folds_by_arm(dataset.assignment, folds, rng);

  Eigen::VectorXd values(n);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> held_out, train;
    for (Eigen::Index i = 0; i < n; ++i) {
      (fold_of[static_cast<std::size_t>(i)] == f ? held_out : train).push_back(static_cast<int>(i));
    }
    if (held_out.empty()) continue;
    if (train.empty()) throw EstimationError("cross-fitting fold left no training data");

    TrialDataset complement;
    complement.covariates.resize(static_cast<Eigen::Index>(train.size()), dataset.n_covariates());
    complement.strata.resize(static_cast<Eigen::Index>(train.size()));
    complement.assignment.resize(static_cast<Eigen::Index>(train.size()));
    complement.outcome.resize(static_cast<Eigen::Index>(train.size()));
    for (std::size_t r = 0; r < train.size(); ++r) {
      const Eigen::Index i = train[r];
      const Eigen::Index at = static_cast<Eigen::Index>(r);
      complement.covariates.row(at) = dataset.covariates.row(i);
      complement.strata(at) = dataset.strata(i);
      complement.assignment(at) = dataset.assignment(i);
      complement.outcome(at) = dataset.outcome(i);
    }
    complement.pi = dataset.pi;
    complement.scheme = dataset.scheme;
    complement.n_strata = dataset.n_strata;
    if (complement.arm_count(1) == 0 || complement.arm_count(0) == 0) {
      throw EstimationError("cross-fitting fold too small: an arm is empty in the complement");
    }

    auto [m1, m0] = fit_arm_models(complement, learner, rng);
    const AugmentationFn b = plugin_b_opt(m1, m0, complement, pi, link);
    for (int i : held_out) {
      values(i) = b.eval(dataset.covariates.row(i).transpose(), dataset.strata(i));
    }
  }
  return values;
}

VarianceEstimate cross_fit_variance(const TrialDataset& dataset, double pi,
                                    const LearnerOptions& learner, const LinkSpec& link,
                                    int folds, Rng& rng, bool calibrated) {
  const Eigen::VectorXd values = cross_fit_b_values(dataset, pi, learner, link, folds, rng);
  VarianceEstimate est;
  if (calibrated) {
    const CalibrationTable table = calibrate_values(dataset, values, pi, link);
    est = if_variance_values(dataset, pi, values, link, &table);
  } else {
    est = if_variance_values(dataset, pi, values, link, nullptr);
  }
  est.cross_validated = true;
  return est;
}

namespace {

// Acklam's rational approximation to the standard normal quantile, polished
// with one Halley step against erfc.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double q, r, x;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw EstimationError("quantile probability must lie in (0, 1)");
  double x = acklam(p);
  // Halley refinement
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

std::pair<double, double> wald_interval(double delta_hat, double se, double level) {
  if (se < 0.0) throw EstimationError("standard error must be nonnegative");
  if (!(level > 0.0 && level < 1.0)) throw EstimationError("level must lie in (0, 1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  return {delta_hat - z * se, delta_hat + z * se};
}

}  // namespace strataug
