#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace strataug {

enum class Scheme { simple, stratified_block };
enum class OutcomeType { continuous, binary };

const char* to_string(Scheme s);
const char* to_string(OutcomeType t);
Scheme scheme_from_string(const std::string& s);
OutcomeType outcome_type_from_string(const std::string& s);

struct SubjectRecord {
  Eigen::VectorXd covariates;
  int stratum = 1;     // label in 1..K
  int assignment = 0;  // 0 control, 1 treated
  double outcome = 0.0;
};

// Total partition rule mapping a covariate vector to a stratum label 1..n_strata.
struct StratumMap {
  int n_strata = 1;
  std::function<int(const Eigen::Ref<const Eigen::VectorXd>&)> label;
};

// S = 1 + I(W1 > 0) + 2 I(W2 > 0): four strata from the signs of the first
// two covariates.
StratumMap sign_quadrant_map();

// Column-oriented trial data; rows are subjects in enrollment order.
struct TrialDataset {
  Eigen::MatrixXd covariates;  // n x p
  Eigen::VectorXi strata;      // labels in 1..n_strata
  Eigen::VectorXi assignment;  // 0/1
  Eigen::VectorXd outcome;
  double pi = 0.5;
  Scheme scheme = Scheme::simple;
  int n_strata = 1;

  Eigen::Index n() const { return covariates.rows(); }
  Eigen::Index n_covariates() const { return covariates.cols(); }
  SubjectRecord record(Eigen::Index i) const;

  Eigen::Index arm_count(int a) const;
  // arm mean of the outcome; throws EstimationError on an empty arm
  double arm_mean(int a) const;
};

// Recomputes every stratum label from the map and sets n_strata to its range.
TrialDataset attach_strata(TrialDataset dataset, const StratumMap& map);

struct EstimandValue {
  double delta = 0.0;
  double mu1 = 0.0;
  double mu0 = 0.0;
  double mc_se = 0.0;  // 0 when the value is exact
};

}  // namespace strataug
