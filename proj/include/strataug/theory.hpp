#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strataug/estimators.hpp"
#include "strataug/link.hpp"
#include "strataug/scenarios.hpp"

namespace strataug {

// Population-level description of a simulation scenario: closed-form
// conditional means, exact or cached-Monte-Carlo arm means, and a sampler for
// (W, Y(1), Y(0)).
struct PopulationOracle {
  Scenario scenario = Scenario::A;
  OutcomeType outcome = OutcomeType::continuous;
  LinkSpec link;
  double pi = 0.5;
  StratumMap strata;
  double mu1 = 0.0;
  double mu0 = 0.0;
  double mu_mc_se = 0.0;   // 0 when the arm means are exact
  double noise_sd = 1.0;   // continuous outcomes only

  // conditional means E[Y(a) | W]; the factory wires these to the scenario
  // formulas, and tests may substitute degenerate versions
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> m1_fn;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> m0_fn;

  double m(int a, const Eigen::Ref<const Eigen::VectorXd>& w) const {
    return a == 1 ? m1_fn(w) : m0_fn(w);
  }
  double b_opt(const Eigen::Ref<const Eigen::VectorXd>& w) const;
  double true_delta() const { return link.g(mu1) - link.g(mu0); }

  // Realized potential outcome for arm a from one uniform or normal noise
  // value, so draws can be shared across arms and augmentation choices.
  double outcome_from_noise(int a, const Eigen::Ref<const Eigen::VectorXd>& w,
                            double normal_noise, double uniform_noise) const;
};

// Binary arm means (and the log-odds-ratio MC standard error) come from a
// 1e7-draw Monte Carlo cache keyed by scenario.
PopulationOracle make_population_oracle(Scenario scenario, OutcomeType outcome, double pi = 0.5);

struct IdentityCheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double mc_se = 0.0;  // batch-means standard error of lhs - rhs
  double abs_tol = 0.0;
  bool pass = false;
};

struct McOptions {
  std::int64_t n_mc = 1'000'000;
  int chunks = 25;
  std::uint64_t seed = 20240501;
  double abs_tol = 1e-3;
  int workers = 0;  // 0: hardware concurrency
};

// Monte-Carlo estimate of Var{psi(O) - (A - pi) b(W)} with its batch-means
// standard error.
std::pair<double, double> sigma2(const AugmentationFn& b, const PopulationOracle& oracle,
                                 const McOptions& options);

struct StratumTable {
  Eigen::VectorXd values;
  Eigen::VectorXd mc_se;
};

// Conditional means of f(W) given S = k, one entry per stratum.
StratumTable project_onto_S(const AugmentationFn& f, const PopulationOracle& oracle,
                            const McOptions& options);

// sigma2(b) - sigma2(b_opt)  ==  pi (1 - pi) E[(b - b_opt)^2]
IdentityCheckResult check_prop1(const AugmentationFn& b, const PopulationOracle& oracle,
                                const McOptions& options);
// sigma2_strat(b)  ==  sigma2(Lambda b)
IdentityCheckResult check_prop2(const AugmentationFn& b, const PopulationOracle& oracle,
                                const McOptions& options);
// sigma2_strat(0)  ==  sigma2(c_opt) with c_opt the S-projection of b_opt
IdentityCheckResult check_eq5(const PopulationOracle& oracle, const McOptions& options);
// Cov{psi - (A - pi) b_opt, (A - pi) d}  ==  0; the negative control shifts
// b_opt by W1 so the check must fail.
IdentityCheckResult check_orthogonality(const AugmentationFn& d, const PopulationOracle& oracle,
                                        const McOptions& options, bool negative_control = false);

// One row per identity check over all scenarios and both outcome types.
std::vector<IdentityCheckResult> run_verification_suite(const McOptions& options,
                                                        bool include_negative_control);

}  // namespace strataug
