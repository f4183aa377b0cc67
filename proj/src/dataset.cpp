#include "strataug/dataset.hpp"

#include "strataug/errors.hpp"

namespace strataug {

const char* to_string(Scheme s) {
  return s == Scheme::simple ? "simple" : "stratified";
}

const char* to_string(OutcomeType t) {
  return t == OutcomeType::continuous ? "continuous" : "binary";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "simple") return Scheme::simple;
  if (s == "stratified" || s == "stratified_block") return Scheme::stratified_block;
  throw ConfigError("unknown scheme: " + s);
}

OutcomeType outcome_type_from_string(const std::string& s) {
  if (s == "continuous") return OutcomeType::continuous;
  if (s == "binary") return OutcomeType::binary;
  throw ConfigError("unknown outcome type: " + s);
}

StratumMap sign_quadrant_map() {
  StratumMap map;
  map.n_strata = 4;
  map.label = [](const Eigen::Ref<const Eigen::VectorXd>& w) {
    return 1 + (w(0) > 0.0 ? 1 : 0) + (w(1) > 0.0 ? 2 : 0);
  };
  return map;
}

SubjectRecord TrialDataset::record(Eigen::Index i) const {
  SubjectRecord r;
  r.covariates = covariates.row(i).transpose();
  r.stratum = strata(i);
  r.assignment = assignment(i);
  r.outcome = outcome(i);
  return r;
}

Eigen::Index TrialDataset::arm_count(int a) const {
  return (assignment.array() == a).count();
}

double TrialDataset::arm_mean(int a) const {
  Eigen::Index count = 0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (assignment(i) == a) {
      sum += outcome(i);
      ++count;
    }
  }
  if (count == 0) {
    throw EstimationError(std::string("arm ") + (a == 1 ? "1" : "0") + " is empty");
  }
  return sum / static_cast<double>(count);
}

TrialDataset attach_strata(TrialDataset dataset, const StratumMap& map) {
  dataset.strata.resize(dataset.n());
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    dataset.strata(i) = map.label(dataset.covariates.row(i).transpose());
  }
  dataset.n_strata = map.n_strata;
  return dataset;
}

}  // namespace strataug
