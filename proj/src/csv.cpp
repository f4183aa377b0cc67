#include "strataug/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
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

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, const std::string& context) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw ConfigError("cannot parse number '" + cell + "' in " + context);
  }
  return value;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream stream(text);
  std::string line;
  bool first = true;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      std::vector<std::string> cells = split_line(line);
      cells.resize(table.header.size());
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw ConfigError("CSV input has no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open CSV file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str());
}

std::string trial_to_csv(const TrialDataset& dataset) {
  std::string out = "y,a,s";
  for (Eigen::Index j = 0; j < dataset.n_covariates(); ++j) {
    out += ",w" + std::to_string(j + 1);
  }
  out += "\n";
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    out += format_significant(dataset.outcome(i), 12);
    out += "," + std::to_string(dataset.assignment(i));
    out += "," + std::to_string(dataset.strata(i));
    for (Eigen::Index j = 0; j < dataset.n_covariates(); ++j) {
      out += "," + format_significant(dataset.covariates(i, j), 12);
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path);
  file << content;
}

void write_trial_csv(const TrialDataset& dataset, const std::string& path) {
  write_text_file(path, trial_to_csv(dataset));
}

TrialDataset trial_from_csv(const CsvTable& table, double pi, Scheme scheme) {
  const auto y_col = table.column("y");
  const auto a_col = table.column("a");
  const auto s_col = table.column("s");
  if (!y_col || !a_col || !s_col) {
    throw ConfigError("trial CSV must have columns y, a, s");
  }
  std::vector<std::size_t> w_cols;
  for (int j = 1;; ++j) {
    const auto col = table.column("w" + std::to_string(j));
    if (!col) break;
    w_cols.push_back(*col);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
  TrialDataset dataset;
  dataset.covariates.resize(n, static_cast<Eigen::Index>(w_cols.size()));
  dataset.strata.resize(n);
  dataset.assignment.resize(n);
  dataset.outcome.resize(n);
  dataset.pi = pi;
  dataset.scheme = scheme;
  int max_stratum = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    dataset.outcome(i) = parse_cell(row[*y_col], "column y");
    dataset.assignment(i) = static_cast<int>(parse_cell(row[*a_col], "column a"));
    dataset.strata(i) = static_cast<int>(parse_cell(row[*s_col], "column s"));
    max_stratum = std::max(max_stratum, dataset.strata(i));
    for (std::size_t j = 0; j < w_cols.size(); ++j) {
      dataset.covariates(i, static_cast<Eigen::Index>(j)) =
          parse_cell(row[w_cols[j]], "column w" + std::to_string(j + 1));
    }
  }
  dataset.n_strata = max_stratum;
  return dataset;
}

}  // namespace strataug
