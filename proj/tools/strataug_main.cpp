#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "strataug/analyze.hpp"
#include "strataug/config.hpp"
#include "strataug/csv.hpp"
#include "strataug/errors.hpp"
#include "strataug/report.hpp"
#include "strataug/simulation.hpp"
#include "strataug/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerificationFailed = 2;
constexpr int kExitEstimation = 3;

struct CliOverrides {
  std::string config_path;
  std::string seed, reps, n, scheme, block_size, out, format, level, workers, folds;
  std::string scenario, outcome, methods, n_mc, pi, data, link;
  bool negative_control = false;
};

strataug::RunConfig build_config(const CliOverrides& cli) {
  strataug::RunConfig config;
  if (!cli.config_path.empty()) config = strataug::parse_config_file(cli.config_path, config);
  std::string overrides;
  const auto set = [&overrides](const std::string& key, const std::string& value) {
    if (!value.empty()) overrides += key + " = " + value + "\n";
  };
  set("seed", cli.seed);
  set("reps", cli.reps);
  set("n", cli.n);
  set("scheme", cli.scheme);
  set("block_size", cli.block_size);
  set("out", cli.out);
  set("format", cli.format);
  set("level", cli.level);
  set("workers", cli.workers);
  set("folds", cli.folds);
  set("scenario", cli.scenario);
  set("outcome", cli.outcome);
  set("methods", cli.methods);
  set("n_mc", cli.n_mc);
  set("pi", cli.pi);
  set("data", cli.data);
  set("link", cli.link);
  if (cli.negative_control) overrides += "negative_control = true\n";
  return strataug::parse_config_text(overrides, std::move(config));
}

void emit(const strataug::RunConfig& config, const std::string& csv, const std::string& text) {
  const std::string& body = config.format == "csv" ? csv : text;
  if (config.out_path.empty()) {
    std::cout << body;
  } else {
    strataug::write_text_file(config.out_path, body);
  }
}

int cmd_simulate(const strataug::RunConfig& config) {
  strataug::validate_simulate(config);
  strataug::ScenarioSpec spec;
  spec.scenario = config.scenario;
  spec.outcome = config.outcome;
  spec.n = config.n;
  spec.replications = config.reps;
  spec.seed = config.seed;
  spec.plan.pi = config.pi;
  spec.plan.block_size = config.block_size;

  std::vector<strataug::MethodSpec> methods;
  for (strataug::Method m : config.methods) {
    strataug::MethodSpec method;
    method.method = m;
    method.learner.outcome = config.outcome;
    method.variance_folds = config.folds;
    methods.push_back(method);
  }

  strataug::CampaignOptions options;
  options.schemes = config.scheme_list();
  options.level = config.level;
  options.workers = config.workers;

  const std::vector<strataug::MetricsRow> rows =
      strataug::run_campaign(spec, methods, options);
  emit(config, strataug::metrics_to_csv(rows), strataug::metrics_to_text(rows));
  return kExitOk;
}

int cmd_verify(const strataug::RunConfig& config) {
  strataug::validate_verify(config);
  strataug::McOptions options;
  options.n_mc = config.n_mc;
  options.seed = config.seed;
  options.workers = config.workers;
  const std::vector<strataug::IdentityCheckResult> results =
      strataug::run_verification_suite(options, config.negative_control);
  emit(config, strataug::verification_to_csv(results), strataug::verification_to_text(results));
  for (const strataug::IdentityCheckResult& r : results) {
    if (!r.pass) return kExitVerificationFailed;
  }
  return kExitOk;
}

int cmd_analyze(const strataug::RunConfig& config) {
  const strataug::AnalysisResult result = strataug::run_analysis(config);
  emit(config, strataug::analysis_to_csv(result), strataug::analysis_to_text(result));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariate-adjusted estimation under simple and stratified randomization"};
  app.require_subcommand(1);

  CliOverrides cli;
  const auto add_common = [&cli](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "key = value configuration file");
    sub->add_option("--seed", cli.seed, "RNG seed");
    sub->add_option("--out", cli.out, "output file (default: stdout)");
    sub->add_option("--format", cli.format, "csv or text");
    sub->add_option("--level", cli.level, "confidence level");
    sub->add_option("--workers", cli.workers, "worker threads (0 = auto)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
  add_common(simulate);
  simulate->add_option("--scenario", cli.scenario, "A, B, C or D");
  simulate->add_option("--outcome", cli.outcome, "continuous or binary");
  simulate->add_option("--n", cli.n, "subjects per trial");
  simulate->add_option("--reps", cli.reps, "number of replicates");
  simulate->add_option("--scheme", cli.scheme, "simple, stratified or both");
  simulate->add_option("--block-size", cli.block_size, "permuted block size");
  simulate->add_option("--pi", cli.pi, "allocation probability");
  simulate->add_option("--methods", cli.methods, "comma list of methods");
  simulate->add_option("--folds", cli.folds, "cross-fitting folds");

  CLI::App* analyze = app.add_subcommand("analyze", "covariate-adjusted analysis of a trial CSV");
  add_common(analyze);
  analyze->add_option("--data", cli.data, "input CSV path");
  analyze->add_option("--pi", cli.pi, "allocation probability");
  analyze->add_option("--link", cli.link, "identity, log or logit");
  analyze->add_option("--folds", cli.folds, "cross-fitting folds");

  CLI::App* verify = app.add_subcommand("verify", "numerical checks of the variance identities");
  add_common(verify);
  verify->add_option("--n-mc", cli.n_mc, "Monte Carlo draws per check");
  verify->add_flag("--negative-control", cli.negative_control,
                   "include the deliberately broken orthogonality check");

  CLI11_PARSE(app, argc, argv);

  try {
    const strataug::RunConfig config = build_config(cli);
    if (simulate->parsed()) return cmd_simulate(config);
    if (analyze->parsed()) return cmd_analyze(config);
    if (verify->parsed()) return cmd_verify(config);
  } catch (const strataug::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const strataug::EstimationError& err) {
    std::cerr << "estimation error: " << err.what() << "\n";
    return kExitEstimation;
  }
  return kExitOk;
}
