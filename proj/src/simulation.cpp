#include "strataug/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "strataug/errors.hpp"
#include "strataug/estimators.hpp"
#include "strataug/inference.hpp"
#include "strataug/parallel.hpp"
#include "strataug/rng.hpp"

namespace strataug {

const char* to_string(Method m) {
  switch (m) {
    case Method::emp:
      return "emp";
    case Method::reg_S:
      return "reg_S";
    case Method::reg_W:
      return "reg_W";
    case Method::reg_WS:
      return "reg_WS";
    case Method::aug:
      return "aug";
    case Method::aug_cal:
      return "aug_cal";
  }
  return "emp";
}

Method method_from_string(const std::string& s) {
  if (s == "emp") return Method::emp;
  if (s == "reg_S" || s == "reg_s") return Method::reg_S;
  if (s == "reg_W" || s == "reg_w") return Method::reg_W;
  if (s == "reg_WS" || s == "reg_ws") return Method::reg_WS;
  if (s == "aug") return Method::aug;
  if (s == "aug_cal") return Method::aug_cal;
  throw ConfigError("unknown method: " + s);
}

std::vector<MethodSpec> default_methods(OutcomeType outcome) {
  LearnerOptions learner;
  learner.kind = LearnerKind::super_learner;
  learner.outcome = outcome;
  std::vector<MethodSpec> methods;
  for (Method m : {Method::emp, Method::reg_S, Method::reg_W, Method::reg_WS, Method::aug,
                   Method::aug_cal}) {
    MethodSpec spec;
    spec.method = m;
    spec.learner = learner;
    methods.push_back(spec);
  }
  return methods;
}

TrialDataset generate_trial(const ScenarioSpec& spec, Scheme scheme, int replicate_index) {
  const std::uint64_t rep_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(replicate_index));
  const Eigen::Index n = spec.n;
  const StratumMap map = sign_quadrant_map();

  TrialDataset trial;
  trial.covariates.resize(n, 3);
  trial.strata.resize(n);
  trial.assignment.resize(n);
  trial.outcome.resize(n);
  trial.pi = spec.plan.pi;
  trial.scheme = scheme;
  trial.n_strata = map.n_strata;

  Rng w_rng(derive_seed(rep_seed, 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    trial.covariates(i, 0) = w_rng.normal();
    trial.covariates(i, 1) = w_rng.normal();
    trial.covariates(i, 2) = w_rng.normal();
    trial.strata(i) = map.label(trial.covariates.row(i).transpose());
  }

  const std::uint64_t a_seed = derive_seed(rep_seed, 2);
  if (scheme == Scheme::simple) {
    trial.assignment = simple_randomize(n, spec.plan.pi, a_seed);
  } else {
    RandomizationPlan plan = spec.plan;
    plan.scheme = Scheme::stratified_block;
    plan.seed = a_seed;
    trial.assignment = stratified_block_randomize(trial.strata, plan);
  }

  // one noise value per subject, shared across schemes and arms
  Rng y_rng(derive_seed(rep_seed, 3));
  const LinkSpec model_link =
      make_link(spec.outcome == OutcomeType::continuous ? LinkKind::identity : LinkKind::logit);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta =
        scenario_eta(spec.scenario, trial.covariates.row(i).transpose(), trial.assignment(i));
    if (spec.outcome == OutcomeType::continuous) {
      trial.outcome(i) = eta + y_rng.normal();
    } else {
      trial.outcome(i) = y_rng.uniform01() < model_link.g_inv(eta) ? 1.0 : 0.0;
    }
  }
  return trial;
}

TrialDataset generate_trial(const ScenarioSpec& spec, int replicate_index) {
  return generate_trial(spec, spec.plan.scheme, replicate_index);
}

EstimandValue true_delta(Scenario scenario, OutcomeType outcome) {
  const ScenarioTruth truth = scenario_truth(scenario, outcome);
  EstimandValue value;
  value.delta = truth.delta;
  value.mu1 = truth.mu1;
  value.mu0 = truth.mu0;
  value.mc_se = truth.mc_se;
  return value;
}

namespace {

struct CellResult {
  double delta = 0.0;
  double se_uncorrected = 0.0;
  double se_corrected = 0.0;
  bool ok = false;
  bool fallback = false;
};

// whether the protocol uses the calibration-corrected standard error
bool protocol_corrected(Method method, Scheme scheme) {
  if (method == Method::aug_cal) return true;  // its own display is the calibrated one
  if (scheme == Scheme::simple) return false;
  switch (method) {
    case Method::emp:
    case Method::reg_W:
    case Method::aug:
      return true;  // no explicit adjustment for S
    case Method::reg_S:
    case Method::reg_WS:
      return false;  // the model already adjusts for S
    default:
      return true;
  }
}

CellResult empirical_cell(const TrialDataset& trial, const LinkSpec& link) {
  CellResult cell;
  const PointEstimate point = empirical_estimate(trial, link);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(trial.n());
  const VarianceEstimate unc = if_variance_values(trial, trial.pi, zero, link, nullptr);
  const CalibrationTable table = calibrate_values(trial, zero, trial.pi, link);
  const VarianceEstimate cor = if_variance_values(trial, trial.pi, zero, link, &table);
  cell.delta = point.delta_hat;
  cell.se_uncorrected = unc.se;
  cell.se_corrected = cor.se;
  cell.ok = true;
  return cell;
}

CellResult regression_cell(const TrialDataset& trial, Method method, const LinkSpec& link) {
  const int p = static_cast<int>(trial.n_covariates());
  DesignSpec design;
  switch (method) {
    case Method::reg_S:
      design = design_stratum_dummies(trial.n_strata);
      break;
    case Method::reg_W:
      design = design_covariates(p);
      break;
    default:
      design = design_covariates_and_dummies(p, trial.n_strata);
      break;
  }
  CellResult cell;
  try {
    const RegressionEstimate reg = regression_estimate(trial, design, link);
    const AugmentationFn b = regression_b_reg(reg, design, trial, trial.pi, link);
    const Eigen::VectorXd values = augmentation_values(trial, b);
    const VarianceEstimate unc = if_variance_values(trial, trial.pi, values, link, nullptr);
    const CalibrationTable table = calibrate_values(trial, values, trial.pi, link);
    const VarianceEstimate cor = if_variance_values(trial, trial.pi, values, link, &table);
    cell.delta = reg.point.delta_hat;
    cell.se_uncorrected = unc.se;
    cell.se_corrected = cor.se;
    cell.ok = true;
  } catch (const SingularDesignError&) {
    cell = empirical_cell(trial, link);
    cell.fallback = true;
  } catch (const SeparationError&) {
    cell = empirical_cell(trial, link);
    cell.fallback = true;
  }
  return cell;
}

struct AugCells {
  CellResult aug;
  CellResult aug_cal;
};

AugCells augmentation_cells(const TrialDataset& trial, const MethodSpec& spec,
                            const LinkSpec& link, Rng& rng) {
  AugCells cells;
  try {
    auto [m1, m0] = fit_arm_models(trial, spec.learner, rng);
    const AugmentationFn b = plugin_b_opt(m1, m0, trial, trial.pi, link);
    const Eigen::VectorXd values = augmentation_values(trial, b);

    const PointEstimate aug_point = augmented_estimate_values(trial, trial.pi, values, link);
    const CalibrationTable table = calibrate_values(trial, values, trial.pi, link);
    Eigen::VectorXd shifted = values;
    for (Eigen::Index i = 0; i < trial.n(); ++i) shifted(i) += table.at(trial.strata(i));
    const PointEstimate cal_point = augmented_estimate_values(trial, trial.pi, shifted, link);

    // cross-fitted augmentation values remove the re-substitution bias of the
    // machine-learned b in the variance displays
    const Eigen::VectorXd cf =
        cross_fit_b_values(trial, trial.pi, spec.learner, link, spec.variance_folds, rng);
    const VarianceEstimate unc = if_variance_values(trial, trial.pi, cf, link, nullptr);
    const CalibrationTable cf_table = calibrate_values(trial, cf, trial.pi, link);
    const VarianceEstimate cor = if_variance_values(trial, trial.pi, cf, link, &cf_table);

    cells.aug.delta = aug_point.delta_hat;
    cells.aug.se_uncorrected = unc.se;
    cells.aug.se_corrected = cor.se;
    cells.aug.ok = true;

    cells.aug_cal.delta = cal_point.delta_hat;
    cells.aug_cal.se_uncorrected = cor.se;  // the calibrated display is its own variance
    cells.aug_cal.se_corrected = cor.se;
    cells.aug_cal.ok = true;
  } catch (const EstimationError&) {
    cells.aug.ok = false;
    cells.aug_cal.ok = false;
  }
  return cells;
}

double sample_variance(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

double lower_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

int scheme_stream_id(Scheme scheme) { return scheme == Scheme::simple ? 0 : 1; }

}  // namespace

std::vector<MetricsRow> run_campaign(const ScenarioSpec& spec,
                                     const std::vector<MethodSpec>& methods,
                                     const CampaignOptions& options) {
  if (spec.replications < 2) throw ConfigError("replications must be at least 2");
  if (methods.empty()) throw ConfigError("no methods selected");
  if (options.schemes.empty()) throw ConfigError("no schemes selected");

  const LinkSpec link =
      make_link(spec.outcome == OutcomeType::continuous ? LinkKind::identity : LinkKind::logit);
  const double delta = true_delta(spec.scenario, spec.outcome).delta;
  const int n_methods = static_cast<int>(methods.size());
  const int n_schemes = static_cast<int>(options.schemes.size());
  const int R = spec.replications;

  // the aug and aug_cal cells share one learner pipeline per replicate
  int aug_spec_index = -1;
  for (int m = 0; m < n_methods; ++m) {
    if (methods[m].method == Method::aug || methods[m].method == Method::aug_cal) {
      aug_spec_index = m;
      break;
    }
  }

  struct ReplicateOut {
    std::vector<CellResult> cells;  // scheme-major
    CellResult reference;           // emp under simple randomization
  };
  std::vector<ReplicateOut> outputs(static_cast<std::size_t>(R));

  parallel_for(R, options.workers, [&](std::int64_t r) {
    ReplicateOut& out = outputs[static_cast<std::size_t>(r)];
    out.cells.assign(static_cast<std::size_t>(n_methods * n_schemes), CellResult{});
    const std::uint64_t rep_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));

    const TrialDataset simple_trial = generate_trial(spec, Scheme::simple, static_cast<int>(r));
    try {
      out.reference = empirical_cell(simple_trial, link);
    } catch (const EstimationError&) {
      out.reference.ok = false;
    }

    for (int si = 0; si < n_schemes; ++si) {
      const Scheme scheme = options.schemes[static_cast<std::size_t>(si)];
      const TrialDataset trial = scheme == Scheme::simple
                                     ? simple_trial
                                     : generate_trial(spec, scheme, static_cast<int>(r));
      Rng analysis_rng(derive_seed(rep_seed, 16 + static_cast<std::uint64_t>(scheme_stream_id(scheme))));

      AugCells aug_cells;
      bool aug_done = false;
      for (int m = 0; m < n_methods; ++m) {
        CellResult& cell = out.cells[static_cast<std::size_t>(si * n_methods + m)];
        const Method method = methods[static_cast<std::size_t>(m)].method;
        try {
          switch (method) {
            case Method::emp:
              cell = empirical_cell(trial, link);
              break;
            case Method::reg_S:
            case Method::reg_W:
            case Method::reg_WS:
              cell = regression_cell(trial, method, link);
              break;
            case Method::aug:
            case Method::aug_cal:
              if (!aug_done) {
                aug_cells = augmentation_cells(
                    trial, methods[static_cast<std::size_t>(aug_spec_index)], link, analysis_rng);
                aug_done = true;
              }
              cell = method == Method::aug ? aug_cells.aug : aug_cells.aug_cal;
              break;
          }
        } catch (const EstimationError&) {
          cell.ok = false;
        }
      }
    }
  });

  // aggregate in replicate order; results do not depend on the worker count
  std::vector<double> reference_deltas;
  for (const ReplicateOut& out : outputs) {
    if (out.reference.ok) reference_deltas.push_back(out.reference.delta);
  }
  if (reference_deltas.size() < 2) throw EstimationError("reference cell failed in all replicates");
  const double reference_variance = sample_variance(reference_deltas);

  std::vector<MetricsRow> rows;
  for (int si = 0; si < n_schemes; ++si) {
    for (int m = 0; m < n_methods; ++m) {
      const Method method = methods[static_cast<std::size_t>(m)].method;
      const Scheme scheme = options.schemes[static_cast<std::size_t>(si)];
      std::vector<double> deltas, se_prot, se_unc, se_cor;
      int n_failed = 0, n_fallback = 0;
      int covered_prot = 0, covered_unc = 0, covered_cor = 0;
      const bool corrected = protocol_corrected(method, scheme);
      for (const ReplicateOut& out : outputs) {
        const CellResult& cell = out.cells[static_cast<std::size_t>(si * n_methods + m)];
        if (!cell.ok) {
          ++n_failed;
          continue;
        }
        if (cell.fallback) ++n_fallback;
        deltas.push_back(cell.delta);
        const double prot_se = corrected ? cell.se_corrected : cell.se_uncorrected;
        se_prot.push_back(prot_se);
        se_unc.push_back(cell.se_uncorrected);
        se_cor.push_back(cell.se_corrected);
        const auto in = [&](double se) {
          const auto [lo, hi] = wald_interval(cell.delta, se, options.level);
          return delta >= lo && delta <= hi;
        };
        covered_prot += in(prot_se) ? 1 : 0;
        covered_unc += in(cell.se_uncorrected) ? 1 : 0;
        covered_cor += in(cell.se_corrected) ? 1 : 0;
      }

      MetricsRow row;
      row.scenario = spec.scenario;
      row.outcome = spec.outcome;
      row.method = method;
      row.scheme = scheme;
      row.n = spec.n;
      row.replications = R;
      row.n_failed = n_failed;
      row.n_fallback = n_fallback;
      if (deltas.size() >= 2) {
        double mean = 0.0;
        for (double d : deltas) mean += d;
        mean /= static_cast<double>(deltas.size());
        const double var = sample_variance(deltas);
        row.bias = mean - delta;
        row.sd = std::sqrt(var);
        row.re = reference_variance / var;
        row.median_se = lower_median(se_prot);
        row.median_se_uncorrected = lower_median(se_unc);
        row.median_se_corrected = lower_median(se_cor);
        const double used = static_cast<double>(deltas.size());
        row.cp = covered_prot / used;
        row.cp_uncorrected = covered_unc / used;
        row.cp_corrected = covered_cor / used;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace strataug
