#include "strataug/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "strataug/errors.hpp"
#include "strataug/format.hpp"

namespace strataug {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  T out{};
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto result = std::from_chars(begin, end, out);
  if (result.ec == std::errc::result_out_of_range) {
    throw ConfigError("value out of range for " + key + ": " + value);
  }
  if (result.ec != std::errc() || result.ptr != end) {
    throw ConfigError("cannot parse value for " + key + ": " + value);
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("cannot parse boolean for " + key + ": " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += items[i];
  }
  return out;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(value, key);
  } else if (key == "workers") {
    config.workers = parse_number<int>(value, key);
  } else if (key == "level") {
    config.level = parse_number<double>(value, key);
  } else if (key == "out") {
    config.out_path = value;
  } else if (key == "format") {
    if (value != "csv" && value != "text") throw ConfigError("format must be csv or text");
    config.format = value;
  } else if (key == "scenario") {
    config.scenario = scenario_from_string(value);
  } else if (key == "outcome") {
    config.outcome = outcome_type_from_string(value);
  } else if (key == "n") {
    config.n = parse_number<long long>(value, key);
  } else if (key == "reps") {
    config.reps = parse_number<int>(value, key);
  } else if (key == "pi") {
    config.pi = parse_number<double>(value, key);
  } else if (key == "block_size") {
    config.block_size = parse_number<int>(value, key);
  } else if (key == "scheme") {
    if (value != "simple" && value != "stratified" && value != "both") {
      throw ConfigError("scheme must be simple, stratified or both");
    }
    config.scheme = value;
  } else if (key == "methods") {
    config.methods.clear();
    for (const std::string& item : split_list(value)) {
      config.methods.push_back(method_from_string(item));
    }
  } else if (key == "folds") {
    config.folds = parse_number<int>(value, key);
  } else if (key == "n_mc") {
    config.n_mc = parse_number<long long>(value, key);
  } else if (key == "negative_control") {
    config.negative_control = parse_bool(value, key);
  } else if (key == "data") {
    config.data_path = value;
  } else if (key == "outcome_cols") {
    config.outcome_cols = split_list(value);
  } else if (key == "treatment_col") {
    config.treatment_col = value;
  } else if (key == "stratum_col") {
    config.stratum_col = value;
  } else if (key == "covariate_cols") {
    config.covariate_cols = split_list(value);
  } else if (key == "link") {
    config.link = link_kind_from_string(value);
  } else if (key.rfind("rescale.", 0) == 0) {
    const std::string column = key.substr(8);
    if (column.empty()) throw ConfigError("rescale key needs a column name");
    const std::vector<std::string> parts = split_list(value);
    if (parts.size() != 2 && parts.size() != 3) {
      throw ConfigError("rescale value must be min,max or min,max,flip");
    }
    RescaleSpec spec;
    spec.min = parse_number<double>(parts[0], key);
    spec.max = parse_number<double>(parts[1], key);
    spec.flip = parts.size() == 3 ? parse_bool(parts[2], key) : false;
    if (!(spec.max > spec.min)) throw ConfigError("rescale needs max > min for " + key);
    config.rescale[column] = spec;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

std::vector<Scheme> RunConfig::scheme_list() const {
  if (scheme == "simple") return {Scheme::simple};
  if (scheme == "stratified") return {Scheme::stratified_block};
  return {Scheme::simple, Scheme::stratified_block};
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::stringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) + " has an empty key");
    }
    apply_key(base, key, value);
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str(), std::move(base));
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  const auto add = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  add("seed", std::to_string(config.seed));
  add("workers", std::to_string(config.workers));
  add("level", format_significant(config.level, 12));
  if (!config.out_path.empty()) add("out", config.out_path);
  add("format", config.format);
  add("scenario", to_string(config.scenario));
  add("outcome", to_string(config.outcome));
  add("n", std::to_string(config.n));
  add("reps", std::to_string(config.reps));
  add("pi", format_significant(config.pi, 12));
  add("block_size", std::to_string(config.block_size));
  add("scheme", config.scheme);
  std::vector<std::string> method_names;
  for (Method m : config.methods) method_names.push_back(to_string(m));
  add("methods", join(method_names));
  add("folds", std::to_string(config.folds));
  add("n_mc", std::to_string(config.n_mc));
  add("negative_control", config.negative_control ? "true" : "false");
  if (!config.data_path.empty()) add("data", config.data_path);
  add("outcome_cols", join(config.outcome_cols));
  add("treatment_col", config.treatment_col);
  add("stratum_col", config.stratum_col);
  if (!config.covariate_cols.empty()) add("covariate_cols", join(config.covariate_cols));
  add("link", to_string(config.link));
  for (const auto& [column, spec] : config.rescale) {
    std::string value = format_significant(spec.min, 12) + "," + format_significant(spec.max, 12);
    if (spec.flip) value += ",true";
    add("rescale." + column, value);
  }
  return out;
}

namespace {

void validate_shared(const RunConfig& config) {
  if (!(config.level > 0.0 && config.level < 1.0)) {
    throw ConfigError("level must lie in (0, 1)");
  }
  if (config.workers < 0) throw ConfigError("workers must be nonnegative");
  if (!(config.pi > 0.0 && config.pi < 1.0)) throw ConfigError("pi must lie in (0, 1)");
}

}  // namespace

void validate_simulate(const RunConfig& config) {
  validate_shared(config);
  if (config.n < 2) throw ConfigError("n must be at least 2");
  if (config.reps < 2) throw ConfigError("reps must be at least 2");
  if (config.block_size < 2) throw ConfigError("block_size must be at least 2");
  if (config.folds < 2) throw ConfigError("folds must be at least 2");
  if (config.methods.empty()) throw ConfigError("methods must not be empty");
}

void validate_verify(const RunConfig& config) {
  validate_shared(config);
  if (config.n_mc < 10'000) throw ConfigError("n_mc must be at least 10000");
}

void validate_analyze(const RunConfig& config) {
  validate_shared(config);
  if (config.data_path.empty()) throw ConfigError("analyze needs a data file (data = path)");
  if (config.outcome_cols.empty()) throw ConfigError("outcome_cols must not be empty");
  if (config.folds < 2) throw ConfigError("folds must be at least 2");
}

}  // namespace strataug
