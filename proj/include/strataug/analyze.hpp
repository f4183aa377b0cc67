#pragma once

#include <string>
#include <vector>

#include "strataug/config.hpp"

namespace strataug {

struct AnalysisRow {
  std::string outcome;
  Method method = Method::emp;
  double estimate = 0.0;
  double se_uncorrected = 0.0;
  double se_corrected = 0.0;
  double ci_lo = 0.0;  // Wald interval from the corrected standard error
  double ci_hi = 0.0;
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;
  int n_dropped = 0;  // rows removed for missing required fields
  Eigen::Index n_used = 0;
  std::vector<std::string> warnings;
};

// Covariate-adjusted analysis of a stratified trial CSV: runs the six
// methods on every configured outcome column.
AnalysisResult run_analysis(const RunConfig& config);

}  // namespace strataug
