#pragma once

#include <Eigen/Core>
#include <string>

#include "strataug/dataset.hpp"

namespace strataug {

enum class Scenario { A, B, C, D };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Conditional mean of the outcome on the model scale: identity for continuous
// outcomes, logit for binary ones. Covariates are trivariate standard normal.
double scenario_eta(Scenario scenario, const Eigen::Ref<const Eigen::VectorXd>& w, int a);

// Exact population means of Y(a) for the continuous outcome (Gaussian moments).
double continuous_mu(Scenario scenario, int a);

struct ScenarioTruth {
  double mu1 = 0.0;
  double mu0 = 0.0;
  double delta = 0.0;  // on the estimand scale: mean difference or log odds ratio
  double mc_se = 0.0;  // 0 when exact
};

// Continuous truths are exact; binary arm means are a cached 1e7-draw Monte
// Carlo average of expit(eta_a(W)) with a delta-method standard error for the
// log odds ratio.
ScenarioTruth scenario_truth(Scenario scenario, OutcomeType outcome);

}  // namespace strataug
