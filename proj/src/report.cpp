#include "strataug/report.hpp"

#include <algorithm>
#include <sstream>

#include "strataug/format.hpp"

namespace strataug {

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lead(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "scenario,outcome,method,scheme,n,replications,bias,sd,re,median_se,cp,n_failed\n";
  for (const MetricsRow& row : rows) {
    out += std::string(to_string(row.scenario)) + "," + to_string(row.outcome) + "," +
           to_string(row.method) + "," + to_string(row.scheme) + "," + std::to_string(row.n) +
           "," + std::to_string(row.replications) + "," + format_significant(row.bias, 6) + "," +
           format_significant(row.sd, 6) + "," + format_significant(row.re, 6) + "," +
           format_significant(row.median_se, 6) + "," + format_significant(row.cp, 6) + "," +
           std::to_string(row.n_failed) + "\n";
  }
  return out;
}

std::string metrics_to_text(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) return "(no results)\n";

  std::vector<Scheme> schemes;
  std::vector<Method> methods;
  for (const MetricsRow& row : rows) {
    if (std::find(schemes.begin(), schemes.end(), row.scheme) == schemes.end()) {
      schemes.push_back(row.scheme);
    }
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }
  const auto find_row = [&rows](Method m, Scheme s) -> const MetricsRow* {
    for (const MetricsRow& row : rows) {
      if (row.method == m && row.scheme == s) return &row;
    }
    return nullptr;
  };

  std::ostringstream out;
  const MetricsRow& first = rows.front();
  out << "Scenario " << to_string(first.scenario) << ", " << to_string(first.outcome)
      << " outcome, n = " << first.n << ", " << first.replications << " replications\n\n";

  out << pad("method", 9);
  for (Scheme scheme : schemes) {
    out << "| " << pad(std::string(to_string(scheme)) + " randomization", 34);
  }
  out << "\n" << pad("", 9);
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    out << "| " << pad("bias", 7) << pad("sd", 6) << pad("re", 6) << pad("se", 6) << pad("cp", 6)
        << "   ";
  }
  out << "\n";
  int failed = 0, fallback = 0;
  for (Method method : methods) {
    out << pad(to_string(method), 9);
    for (Scheme scheme : schemes) {
      const MetricsRow* row = find_row(method, scheme);
      if (row == nullptr) {
        out << "| " << pad("-", 34);
        continue;
      }
      failed += row->n_failed;
      fallback += row->n_fallback;
      out << "| " << pad(format_fixed(row->bias, 2), 7) << pad(format_fixed(row->sd, 2), 6)
          << pad(format_fixed(row->re, 1), 6) << pad(format_fixed(row->median_se, 2), 6)
          << pad(format_fixed(row->cp, 2), 6) << "   ";
    }
    out << "\n";
  }
  if (failed > 0) out << "\nfailed replicates (excluded): " << failed << "\n";
  if (fallback > 0) out << "regression fits that fell back to empirical: " << fallback << "\n";
  return out.str();
}

std::string analysis_to_csv(const AnalysisResult& result) {
  std::string out = "outcome,method,estimate,se_uncorrected,se_corrected,ci_lo,ci_hi\n";
  for (const AnalysisRow& row : result.rows) {
    out += row.outcome + "," + to_string(row.method) + "," +
           format_significant(row.estimate, 6) + "," +
           format_significant(row.se_uncorrected, 6) + "," +
           format_significant(row.se_corrected, 6) + "," + format_significant(row.ci_lo, 6) +
           "," + format_significant(row.ci_hi, 6) + "\n";
  }
  return out;
}

std::string analysis_to_text(const AnalysisResult& result) {
  std::ostringstream out;
  out << pad("outcome", 16) << pad("method", 9) << lead("estimate", 10) << lead("se(unc)", 10)
      << lead("se(cor)", 10) << lead("ci", 20) << "\n";
  for (const AnalysisRow& row : result.rows) {
    out << pad(row.outcome, 16) << pad(to_string(row.method), 9)
        << lead(format_fixed(row.estimate, 3), 10) << lead(format_fixed(row.se_uncorrected, 3), 10)
        << lead(format_fixed(row.se_corrected, 3), 10)
        << lead("[" + format_fixed(row.ci_lo, 3) + ", " + format_fixed(row.ci_hi, 3) + "]", 20)
        << "\n";
  }
  out << "\nrows used: " << result.n_used << ", dropped for missing fields: " << result.n_dropped
      << "\n";
  for (const std::string& warning : result.warnings) out << "warning: " << warning << "\n";
  return out.str();
}

std::string verification_to_csv(const std::vector<IdentityCheckResult>& results) {
  std::string out = "check,lhs,rhs,mc_se,pass\n";
  for (const IdentityCheckResult& r : results) {
    out += r.name + "," + format_significant(r.lhs, 6) + "," + format_significant(r.rhs, 6) +
           "," + format_significant(r.mc_se, 6) + "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

std::string verification_to_text(const std::vector<IdentityCheckResult>& results) {
  std::ostringstream out;
  out << pad("check", 46) << lead("lhs", 12) << lead("rhs", 12) << lead("mc_se", 12)
      << "  result\n";
  for (const IdentityCheckResult& r : results) {
    out << pad(r.name, 46) << lead(format_significant(r.lhs, 5), 12)
        << lead(format_significant(r.rhs, 5), 12) << lead(format_significant(r.mc_se, 3), 12)
        << "  " << (r.pass ? "pass" : "FAIL") << "\n";
  }
  return out.str();
}

}  // namespace strataug
