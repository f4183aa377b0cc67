#include "strataug/analyze.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "strataug/csv.hpp"
#include "strataug/errors.hpp"
#include "strataug/estimators.hpp"
#include "strataug/inference.hpp"
#include "strataug/rng.hpp"

namespace strataug {

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan";
}

double parse_value(const std::string& cell, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw ConfigError("cannot parse number '" + cell + "' in column " + column);
  }
  return value;
}

std::vector<std::string> detect_covariate_columns(const CsvTable& table) {
  std::vector<std::pair<int, std::string>> found;
  for (const std::string& name : table.header) {
    if (name.size() < 2 || name[0] != 'w') continue;
    int index = 0;
    const auto result = std::from_chars(name.data() + 1, name.data() + name.size(), index);
    if (result.ec == std::errc() && result.ptr == name.data() + name.size() && index >= 1) {
      found.emplace_back(index, name);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> columns;
  for (const auto& [index, name] : found) columns.push_back(name);
  return columns;
}

}  // namespace

AnalysisResult run_analysis(const RunConfig& config) {
  validate_analyze(config);
  const CsvTable table = read_csv(config.data_path);

  std::vector<std::string> covariate_cols = config.covariate_cols;
  if (covariate_cols.empty()) covariate_cols = detect_covariate_columns(table);
  if (covariate_cols.empty()) {
    throw ConfigError("no covariate columns: set covariate_cols or name columns w1..wp");
  }

  // resolve all required columns up front and report every missing one
  std::vector<std::string> required = {config.treatment_col, config.stratum_col};
  required.insert(required.end(), covariate_cols.begin(), covariate_cols.end());
  required.insert(required.end(), config.outcome_cols.begin(), config.outcome_cols.end());
  std::vector<std::string> missing;
  std::map<std::string, std::size_t> column_of;
  for (const std::string& name : required) {
    const auto col = table.column(name);
    if (!col) {
      missing.push_back(name);
    } else {
      column_of[name] = *col;
    }
  }
  if (!missing.empty()) {
    std::string message = "missing required columns:";
    for (const std::string& name : missing) message += " " + name;
    throw ConfigError(message);
  }

  // complete cases over every column the analysis uses
  AnalysisResult result;
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool complete = true;
    for (const auto& [name, col] : column_of) {
      if (is_missing(table.rows[r][col])) {
        complete = false;
        break;
      }
    }
    if (complete) {
      kept.push_back(r);
    } else {
      ++result.n_dropped;
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(kept.size());
  result.n_used = n;
  if (n < 2) throw EstimationError("fewer than 2 complete-case rows");

  const int p = static_cast<int>(covariate_cols.size());
  TrialDataset base;
  base.covariates.resize(n, p);
  base.strata.resize(n);
  base.assignment.resize(n);
  base.outcome.resize(n);
  base.pi = config.pi;
  base.scheme = Scheme::stratified_block;

  std::set<int> labels;
  std::vector<int> raw_strata(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[kept[static_cast<std::size_t>(i)]];
    const double a = parse_value(row[column_of[config.treatment_col]], config.treatment_col);
    if (a != 0.0 && a != 1.0) {
      throw ConfigError("treatment column must contain 0/1 values");
    }
    base.assignment(i) = static_cast<int>(a);
    const double s = parse_value(row[column_of[config.stratum_col]], config.stratum_col);
    raw_strata[static_cast<std::size_t>(i)] = static_cast<int>(s);
    labels.insert(static_cast<int>(s));
    for (int j = 0; j < p; ++j) {
      base.covariates(i, j) = parse_value(row[column_of[covariate_cols[static_cast<std::size_t>(j)]]],
                                          covariate_cols[static_cast<std::size_t>(j)]);
    }
  }
  // map observed stratum labels onto 1..K in sorted order
  std::map<int, int> dense;
  for (int label : labels) dense[label] = static_cast<int>(dense.size()) + 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    base.strata(i) = dense[raw_strata[static_cast<std::size_t>(i)]];
  }
  base.n_strata = static_cast<int>(dense.size());

  if (base.arm_count(1) < 10 || base.arm_count(0) < 10) {
    throw EstimationError("need at least 10 complete-case rows per arm");
  }

  const LinkSpec link = make_link(config.link);
  LearnerOptions learner;
  learner.kind = LearnerKind::super_learner;
  learner.outcome = config.link == LinkKind::logit ? OutcomeType::binary : OutcomeType::continuous;

  for (std::size_t oc = 0; oc < config.outcome_cols.size(); ++oc) {
    const std::string& outcome_col = config.outcome_cols[oc];
    TrialDataset trial = base;
    for (Eigen::Index i = 0; i < n; ++i) {
      trial.outcome(i) =
          parse_value(table.rows[kept[static_cast<std::size_t>(i)]][column_of[outcome_col]],
                      outcome_col);
    }
    const auto rescale = config.rescale.find(outcome_col);
    if (rescale != config.rescale.end()) {
      const RescaleSpec& spec = rescale->second;
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = (trial.outcome(i) - spec.min) / (spec.max - spec.min);
        if (spec.flip) v = 1.0 - v;
        trial.outcome(i) = v;
      }
    }

    Rng rng(derive_seed(config.seed, 0xa7a1u + oc));
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);

    const auto push_row = [&](Method method, double estimate, const Eigen::VectorXd& b_values) {
      const VarianceEstimate unc = if_variance_values(trial, trial.pi, b_values, link, nullptr);
      const CalibrationTable cal = calibrate_values(trial, b_values, trial.pi, link);
      const VarianceEstimate cor = if_variance_values(trial, trial.pi, b_values, link, &cal);
      AnalysisRow row;
      row.outcome = outcome_col;
      row.method = method;
      row.estimate = estimate;
      row.se_uncorrected = unc.se;
      row.se_corrected = cor.se;
      std::tie(row.ci_lo, row.ci_hi) = wald_interval(estimate, cor.se, config.level);
      result.rows.push_back(row);
    };

    // empirical
    push_row(Method::emp, empirical_estimate(trial, link).delta_hat, zero);

    // regression methods; singular or separated fits fall back to empirical
    for (Method method : {Method::reg_S, Method::reg_W, Method::reg_WS}) {
      DesignSpec design;
      if (method == Method::reg_S) {
        design = design_stratum_dummies(trial.n_strata);
      } else if (method == Method::reg_W) {
        design = design_covariates(p);
      } else {
        design = design_covariates_and_dummies(p, trial.n_strata);
      }
      try {
        const RegressionEstimate reg = regression_estimate(trial, design, link);
        const AugmentationFn b = regression_b_reg(reg, design, trial, trial.pi, link);
        push_row(method, reg.point.delta_hat, augmentation_values(trial, b));
      } catch (const EstimationError& err) {
        result.warnings.push_back(std::string(to_string(method)) + " on " + outcome_col +
                                  " fell back to empirical: " + err.what());
        push_row(method, empirical_estimate(trial, link).delta_hat, zero);
      }
    }

    // augmentation with the super learner; variance from cross-fitted values
    auto [m1, m0] = fit_arm_models(trial, learner, rng);
    const AugmentationFn b = plugin_b_opt(m1, m0, trial, trial.pi, link);
    const Eigen::VectorXd values = augmentation_values(trial, b);
    const Eigen::VectorXd cf =
        cross_fit_b_values(trial, trial.pi, learner, link, config.folds, rng);

    const PointEstimate aug_point = augmented_estimate_values(trial, trial.pi, values, link);
    push_row(Method::aug, aug_point.delta_hat, cf);

    const CalibrationTable table = calibrate_values(trial, values, trial.pi, link);
    Eigen::VectorXd shifted = values;
    for (Eigen::Index i = 0; i < n; ++i) shifted(i) += table.at(trial.strata(i));
    const PointEstimate cal_point = augmented_estimate_values(trial, trial.pi, shifted, link);
    push_row(Method::aug_cal, cal_point.delta_hat, cf);
  }
  return result;
}

}  // namespace strataug
