#pragma once

#include <string>
#include <vector>

namespace mad {

struct QuestionRecord {
  std::string id;
  std::string prompt;                // full question text shown to agents
  std::vector<std::string> labels;   // answer labels; empty for free-form
  bool free_form = false;            // numeric free-form task (GSM8K-style)
  std::string gold;                  // canonical gold label
};

enum class DatasetFormat { mcq_json, gsm8k_lines };

DatasetFormat dataset_format_from_string(const std::string& s);

// mcq-json: a JSON array of {id, question, options: [text, ...], gold: "A"}
//   (labels are "A".. per option; an explicit "labels" array may replace
//   "options" when only label strings matter).
// gsm8k-lines: JSONL of {id?, question, answer} where the answer text carries
//   the gold value after a "####" marker.
// Malformed rows and duplicate ids raise DataError naming the offending
// line/field.
std::vector<QuestionRecord> load_dataset(const std::string& path, DatasetFormat format);

}  // namespace mad
