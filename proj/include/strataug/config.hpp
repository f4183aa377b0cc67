#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "strataug/link.hpp"
#include "strataug/scenarios.hpp"
#include "strataug/simulation.hpp"

namespace strataug {

struct RescaleSpec {
  double min = 0.0;
  double max = 1.0;
  bool flip = false;
};

// Flat key-value run configuration shared by the subcommands. Unknown keys
// are rejected; numbers are parsed as decimal with explicit range errors.
struct RunConfig {
  // shared
  std::uint64_t seed = 1;
  int workers = 0;
  double level = 0.95;
  std::string out_path;
  std::string format = "text";  // csv | text

  // simulate
  Scenario scenario = Scenario::A;
  OutcomeType outcome = OutcomeType::continuous;
  long long n = 200;
  int reps = 2500;
  double pi = 0.5;
  int block_size = 4;
  std::string scheme = "both";  // simple | stratified | both
  std::vector<Method> methods = {Method::emp,    Method::reg_S, Method::reg_W,
                                 Method::reg_WS, Method::aug,   Method::aug_cal};
  int folds = 5;

  // verify
  long long n_mc = 1'000'000;
  bool negative_control = false;

  // analyze
  std::string data_path;
  std::vector<std::string> outcome_cols = {"y"};
  std::string treatment_col = "a";
  std::string stratum_col = "s";
  std::vector<std::string> covariate_cols;  // empty: use columns w1..wp
  LinkKind link = LinkKind::identity;
  std::map<std::string, RescaleSpec> rescale;  // keyed by outcome column

  std::vector<Scheme> scheme_list() const;
};

// Applies `key = value` lines from the file on top of `base`; '#' starts a
// comment. Throws ConfigError on unknown keys or malformed values.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

// Canonical serialization; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& config);

void validate_simulate(const RunConfig& config);
void validate_verify(const RunConfig& config);
void validate_analyze(const RunConfig& config);

}  // namespace strataug
