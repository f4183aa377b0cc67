#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "strataug/dataset.hpp"
#include "strataug/learners.hpp"
#include "strataug/randomization.hpp"
#include "strataug/scenarios.hpp"

namespace strataug {

struct ScenarioSpec {
  Scenario scenario = Scenario::A;
  OutcomeType outcome = OutcomeType::continuous;
  Eigen::Index n = 200;
  int replications = 2500;
  RandomizationPlan plan;  // pi and block size; plan.scheme used by generate_trial
  std::uint64_t seed = 1;
};

enum class Method { emp, reg_S, reg_W, reg_WS, aug, aug_cal };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct MethodSpec {
  Method method = Method::emp;
  LearnerOptions learner;  // augmentation methods only
  int variance_folds = 5;  // cross-fitting folds for augmented variance estimates
};

// The six estimators compared in the study, with the four-member super
// learner behind the augmentation methods.
std::vector<MethodSpec> default_methods(OutcomeType outcome);

struct MetricsRow {
  Scenario scenario = Scenario::A;
  OutcomeType outcome = OutcomeType::continuous;
  Method method = Method::emp;
  Scheme scheme = Scheme::simple;
  Eigen::Index n = 0;
  int replications = 0;
  double bias = 0.0;
  double sd = 0.0;
  double re = 0.0;         // var(emp under simple) / var(this cell)
  double median_se = 0.0;  // lower median of the protocol standard errors
  double cp = 0.0;
  // coverage and median SE under both variance displays, for diagnostics
  double median_se_uncorrected = 0.0;
  double median_se_corrected = 0.0;
  double cp_uncorrected = 0.0;
  double cp_corrected = 0.0;
  int n_failed = 0;
  int n_fallback = 0;  // regression fits that fell back to the empirical estimator
};

// Draws one trial for a replicate. Covariates and outcome noise come from
// substreams shared across schemes, so the simple and stratified versions of
// a replicate differ only in treatment assignment.
TrialDataset generate_trial(const ScenarioSpec& spec, Scheme scheme, int replicate_index);
TrialDataset generate_trial(const ScenarioSpec& spec, int replicate_index);

EstimandValue true_delta(Scenario scenario, OutcomeType outcome);

struct CampaignOptions {
  std::vector<Scheme> schemes = {Scheme::simple, Scheme::stratified_block};
  double level = 0.95;
  int workers = 0;
};

// Runs every (scheme, method) cell over the replicates and aggregates the
// study metrics. The relative-efficiency reference (empirical estimator under
// simple randomization) is always evaluated on the same replicate draws.
std::vector<MetricsRow> run_campaign(const ScenarioSpec& spec,
                                     const std::vector<MethodSpec>& methods,
                                     const CampaignOptions& options = {});

}  // namespace strataug
