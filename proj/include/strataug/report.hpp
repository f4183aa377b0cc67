#pragma once

#include <string>
#include <vector>

#include "strataug/analyze.hpp"
#include "strataug/simulation.hpp"
#include "strataug/theory.hpp"

namespace strataug {

// Long-format CSV, one row per (scheme, method); 6 significant digits.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
// Study-style table: methods as rows, one column group per scheme.
std::string metrics_to_text(const std::vector<MetricsRow>& rows);

std::string analysis_to_csv(const AnalysisResult& result);
std::string analysis_to_text(const AnalysisResult& result);

std::string verification_to_csv(const std::vector<IdentityCheckResult>& results);
std::string verification_to_text(const std::vector<IdentityCheckResult>& results);

}  // namespace strataug
