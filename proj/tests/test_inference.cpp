#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "strataug/errors.hpp"
#include "strataug/inference.hpp"
#include "strataug/rng.hpp"
#include "strataug/simulation.hpp"
#include "strataug/theory.hpp"

using namespace strataug;

namespace {

TrialDataset four_subject_fixture() {
  TrialDataset ds;
  ds.covariates = Eigen::MatrixXd::Zero(4, 1);
  ds.strata = Eigen::VectorXi::Ones(4);
  ds.assignment.resize(4);
  ds.assignment << 1, 1, 0, 0;
  ds.outcome.resize(4);
  ds.outcome << 2, 4, 1, 3;
  ds.pi = 0.5;
  return ds;
}

}  // namespace

TEST_CASE("constant outcomes within arms give zero variance") {
  TrialDataset ds = four_subject_fixture();
  ds.outcome << 5, 5, 2, 2;
  const VarianceEstimate v =
      if_variance(ds, 0.5, zero_augmentation(), make_link(LinkKind::identity));
  CHECK(v.sigma2_hat == doctest::Approx(0.0));
  CHECK(v.se == doctest::Approx(0.0));
}

TEST_CASE("hand-computed influence variance") {
  const TrialDataset ds = four_subject_fixture();
  // psi = (-2, 2, 2, -2), so sigma2 = 4 and se = 1
  const VarianceEstimate v =
      if_variance(ds, 0.5, zero_augmentation(), make_link(LinkKind::identity));
  CHECK(v.sigma2_hat == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(v.se == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(!v.corrected_for_stratification);
}

TEST_CASE("single-stratum calibration of a constant augmentation changes nothing") {
  const TrialDataset ds = four_subject_fixture();
  const LinkSpec link = make_link(LinkKind::identity);
  AugmentationFn constant;
  constant.tag = AugmentationTag::custom;
  constant.eval = [](const Eigen::Ref<const Eigen::VectorXd>&, int) { return 3.25; };
  const CalibrationTable table = calibrate(ds, constant, 0.5, link);
  CHECK(table.constants(0) == doctest::Approx(-3.25).epsilon(1e-12));
  const VarianceEstimate v = if_variance(ds, 0.5, constant, link, &table);
  CHECK(v.sigma2_hat == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(v.corrected_for_stratification);
}

TEST_CASE("normal quantile is accurate to 1e-9") {
  // bisection oracle on the erfc-based CDF
  const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (double p : {0.001, 0.025, 0.25, 0.5, 0.75, 0.975, 0.995, 0.9999}) {
    double lo = -8.0, hi = 8.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - 0.5 * (lo + hi)) < 1e-9);
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.75) == doctest::Approx(0.6744898).epsilon(1e-6));
}

TEST_CASE("Wald intervals") {
  const auto degenerate = wald_interval(1.5, 0.0, 0.95);
  CHECK(degenerate.first == 1.5);
  CHECK(degenerate.second == 1.5);

  const auto [lo, hi] = wald_interval(1.0, 0.5, 0.95);
  CHECK(lo == doctest::Approx(0.020018).epsilon(1e-4));
  CHECK(hi == doctest::Approx(1.979982).epsilon(1e-4));

  const auto half = wald_interval(0.0, 1.0, 0.5);
  CHECK(half.second == doctest::Approx(0.6744898).epsilon(1e-6));

  CHECK_THROWS_AS(wald_interval(0.0, -1.0, 0.95), EstimationError);
  CHECK_THROWS_AS(wald_interval(0.0, 1.0, 1.5), EstimationError);
}

TEST_CASE("scale equivariance of the influence variance") {
  ScenarioSpec spec;
  spec.scenario = Scenario::B;
  spec.outcome = OutcomeType::continuous;
  spec.n = 150;
  spec.seed = 10;
  const TrialDataset trial = generate_trial(spec, Scheme::simple, 0);
  const LinkSpec link = make_link(LinkKind::identity);
  Rng rng(3);
  Eigen::VectorXd b(trial.n());
  for (Eigen::Index i = 0; i < trial.n(); ++i) b(i) = rng.normal();

  const double kappa = -2.5;
  TrialDataset scaled = trial;
  scaled.outcome *= kappa;
  const VarianceEstimate base = if_variance_values(trial, 0.5, b, link);
  const VarianceEstimate big = if_variance_values(scaled, 0.5, (kappa * b).eval(), link);
  CHECK(big.se == doctest::Approx(std::abs(kappa) * base.se).epsilon(1e-12));
}

TEST_CASE("cross-fitting matches re-substitution for a parametric learner") {
  ScenarioSpec spec;
  spec.scenario = Scenario::A;
  spec.outcome = OutcomeType::continuous;
  spec.n = 5000;
  spec.seed = 1234;
  const TrialDataset trial = generate_trial(spec, Scheme::simple, 0);
  const LinkSpec link = make_link(LinkKind::identity);

  LearnerOptions learner;
  learner.kind = LearnerKind::ols_interactions;

  Rng rng_fit(77);
  auto [m1, m0] = fit_arm_models(trial, learner, rng_fit);
  const AugmentationFn b = plugin_b_opt(m1, m0, trial, trial.pi, link);
  const VarianceEstimate resub =
      if_variance_values(trial, trial.pi, augmentation_values(trial, b), link);

  Rng rng_cf(78);
  const VarianceEstimate crossed = cross_fit_variance(trial, trial.pi, learner, link, 5, rng_cf);
  CHECK(crossed.cross_validated);
  CHECK(std::abs(crossed.sigma2_hat / resub.sigma2_hat - 1.0) < 0.05);
}

TEST_CASE("cross-fitting exposes the optimism of an overfit tree") {
  ScenarioSpec spec;
  spec.scenario = Scenario::C;
  spec.outcome = OutcomeType::continuous;
  spec.n = 200;
  spec.seed = 99;
  const LinkSpec link = make_link(LinkKind::identity);

  LearnerOptions learner;
  learner.kind = LearnerKind::cart;
  learner.cart.max_depth = 30;
  learner.cart.min_leaf = 1;
  learner.cart.min_improvement = 0.0;

  int larger = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const TrialDataset trial = generate_trial(spec, Scheme::simple, r);
    Rng rng(derive_seed(1000, static_cast<std::uint64_t>(r)));
    auto [m1, m0] = fit_arm_models(trial, learner, rng);
    const AugmentationFn b = plugin_b_opt(m1, m0, trial, trial.pi, link);
    const VarianceEstimate resub =
        if_variance_values(trial, trial.pi, augmentation_values(trial, b), link);
    const VarianceEstimate crossed =
        cross_fit_variance(trial, trial.pi, learner, link, 5, rng);
    if (crossed.sigma2_hat > resub.sigma2_hat) ++larger;
  }
  CHECK(larger >= static_cast<int>(0.9 * reps));
}

TEST_CASE("leave-one-out cross-fitting is deterministic and finite") {
  ScenarioSpec spec;
  spec.scenario = Scenario::A;
  spec.outcome = OutcomeType::continuous;
  spec.n = 16;
  spec.seed = 5;
  const TrialDataset trial = generate_trial(spec, Scheme::simple, 0);
  const LinkSpec link = make_link(LinkKind::identity);
  LearnerOptions learner;
  learner.kind = LearnerKind::ols;

  Rng rng_a(4), rng_b(4);
  const VarianceEstimate a = cross_fit_variance(trial, trial.pi, learner, link,
                                                static_cast<int>(trial.n()), rng_a);
  const VarianceEstimate b = cross_fit_variance(trial, trial.pi, learner, link,
                                                static_cast<int>(trial.n()), rng_b);
  CHECK(std::isfinite(a.sigma2_hat));
  CHECK(a.sigma2_hat == b.sigma2_hat);
}

TEST_CASE("corrected variance shrinks under stratified randomization") {
  ScenarioSpec spec;
  spec.scenario = Scenario::A;
  spec.outcome = OutcomeType::continuous;
  spec.n = 2000;
  spec.seed = 7;
  const TrialDataset trial = generate_trial(spec, Scheme::stratified_block, 0);
  const LinkSpec link = make_link(LinkKind::identity);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(trial.n());
  const VarianceEstimate unc = if_variance_values(trial, trial.pi, zero, link, nullptr);
  const CalibrationTable table = calibrate_values(trial, zero, trial.pi, link);
  const VarianceEstimate cor = if_variance_values(trial, trial.pi, zero, link, &table);
  CHECK(cor.sigma2_hat < unc.sigma2_hat);
}

TEST_CASE("influence variance tracks the population variance") {
  // one-shot check at n = 1e5 against the closed-form sigma2(b_opt) = 5.25
  ScenarioSpec spec;
  spec.scenario = Scenario::A;
  spec.outcome = OutcomeType::continuous;
  spec.n = 100000;
  spec.seed = 3003;
  const TrialDataset trial = generate_trial(spec, Scheme::simple, 0);
  const LinkSpec link = make_link(LinkKind::identity);
  AugmentationFn b_opt;
  b_opt.tag = AugmentationTag::custom;
  b_opt.eval = [](const Eigen::Ref<const Eigen::VectorXd>& w, int) {
    return 4.0 * w(0) - 2.0 * w(1) + 3.0 * w(2);
  };
  const VarianceEstimate v = if_variance(trial, trial.pi, b_opt, link);
  // 3 sigma for the variance estimate is about 0.07
  CHECK(std::abs(v.sigma2_hat - 5.25) < 0.1);
}
