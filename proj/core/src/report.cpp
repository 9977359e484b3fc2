#include "mad/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "mad/errors.hpp"

namespace mad {

TableFormat table_format_from_string(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "markdown" || s == "md") return TableFormat::markdown;
  throw ConfigError("unknown table format: " + s);
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *v;
  return out.str();
}

}  // namespace

std::string render_table(const AnalysisTable& table, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "condition,conformity,obstinacy,delta,events\n";
    for (const auto& row : table.rows) {
      out << row.condition << "," << cell(row.report.conformity) << ","
          << cell(row.report.obstinacy) << "," << cell(row.report.delta) << ","
          << row.report.event_count << "\n";
      for (const auto& [round, sub] : row.report.per_round)
        out << row.condition << "@round" << round << "," << cell(sub.conformity) << ","
            << cell(sub.obstinacy) << "," << cell(sub.delta) << "," << sub.event_count << "\n";
    }
    if (table.ibc) out << "IBC,,," << cell(table.ibc) << ",\n";
    for (const auto& [round, v] : table.per_round_ibc)
      out << "IBC@round" << round << ",,," << cell(v) << ",\n";
  } else {
    out << "| Condition | Conf. | Obst. | Delta | Events |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& row : table.rows) {
      out << "| " << row.condition << " | " << cell(row.report.conformity) << " | "
          << cell(row.report.obstinacy) << " | " << cell(row.report.delta) << " | "
          << row.report.event_count << " |\n";
      for (const auto& [round, sub] : row.report.per_round)
        out << "| " << row.condition << " (round " << round << ") | " << cell(sub.conformity)
            << " | " << cell(sub.obstinacy) << " | " << cell(sub.delta) << " | "
            << sub.event_count << " |\n";
    }
    if (table.ibc) out << "| **IBC** |  |  | " << cell(table.ibc) << " |  |\n";
    for (const auto& [round, v] : table.per_round_ibc)
      out << "| **IBC (round " << round << ")** |  |  | " << cell(v) << " |  |\n";
  }
  return out.str();
}

AccuracySummary majority_accuracy(const std::vector<TranscriptRecord>& records) {
  if (records.empty()) throw DataError("no transcript records to score");
  AccuracySummary summary;
  for (const auto& r : records) {
    if (r.gold.empty())
      throw DataError("transcript record " + r.question_id + " has no gold label");
    ++summary.total;
    if (!r.final_answer.empty() && r.final_answer == r.gold) ++summary.correct;
  }
  summary.percent = 100.0 * static_cast<double>(summary.correct) / static_cast<double>(summary.total);
  return summary;
}

std::string render_accuracy(const std::map<std::string, AccuracySummary>& by_run,
                            TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "run,correct,total,accuracy_percent\n";
    for (const auto& [run, s] : by_run)
      out << run << "," << s.correct << "," << s.total << "," << std::fixed
          << std::setprecision(1) << s.percent << "\n";
  } else {
    out << "| Run | Correct | Total | Accuracy (%) |\n|---|---|---|---|\n";
    for (const auto& [run, s] : by_run)
      out << "| " << run << " | " << s.correct << " | " << s.total << " | " << std::fixed
          << std::setprecision(1) << s.percent << " |\n";
  }
  return out.str();
}

}  // namespace mad
