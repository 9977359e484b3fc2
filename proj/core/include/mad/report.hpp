#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mad/metrics.hpp"
#include "mad/transcript_io.hpp"

namespace mad {

struct AnalysisRow {
  std::string condition;  // e.g. "vanilla", "anonymized"
  BiasReport report;
};

// Conf./Obst./Delta per condition plus an IBC row when the runs are paired.
struct AnalysisTable {
  std::vector<AnalysisRow> rows;
  std::optional<double> ibc;
  std::map<int, std::optional<double>> per_round_ibc;
};

enum class TableFormat { csv, markdown };
TableFormat table_format_from_string(const std::string& s);

std::string render_table(const AnalysisTable& table, TableFormat format);

struct AccuracySummary {
  long total = 0;
  long correct = 0;
  double percent = 0.0;
};

// Majority-vote accuracy at the final round against stored gold labels.
// Raises DataError when records are empty or gold labels are missing.
AccuracySummary majority_accuracy(const std::vector<TranscriptRecord>& records);

std::string render_accuracy(const std::map<std::string, AccuracySummary>& by_run,
                            TableFormat format);

}  // namespace mad
