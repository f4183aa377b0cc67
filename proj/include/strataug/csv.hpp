#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strataug/dataset.hpp"

namespace strataug {

// Minimal comma-separated table: a required header row plus string cells.
// Empty cells stay empty; whitespace around cells is trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

// Dataset serialization with columns y, a, s, w1..wp and 12 significant
// digits. pi and scheme are design metadata supplied by the reader.
std::string trial_to_csv(const TrialDataset& dataset);
void write_trial_csv(const TrialDataset& dataset, const std::string& path);
TrialDataset trial_from_csv(const CsvTable& table, double pi, Scheme scheme);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace strataug
