#include "mad/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mad/errors.hpp"
#include "mad/prompt.hpp"

namespace mad {

using nlohmann::json;

DatasetFormat dataset_format_from_string(const std::string& s) {
  if (s == "mcq-json") return DatasetFormat::mcq_json;
  if (s == "gsm8k-lines") return DatasetFormat::gsm8k_lines;
  throw ConfigError("unknown dataset format: " + s);
}

namespace {

std::vector<QuestionRecord> load_mcq_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw DataError(path + ": top-level value must be an array");

  std::vector<QuestionRecord> out;
  std::set<std::string> seen;
  for (std::size_t row = 0; row < doc.size(); ++row) {
    const json& rec = doc[row];
    auto fail = [&](const std::string& field, const std::string& why) -> void {
      std::string id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                   : ("row " + std::to_string(row));
      throw DataError(path + " [" + id + "]: field '" + field + "' " + why);
    };
    if (!rec.is_object()) fail("<record>", "must be an object");
    if (!rec.contains("id") || !rec["id"].is_string()) fail("id", "missing or not a string");
    if (!rec.contains("question") || !rec["question"].is_string()) fail("question", "missing or not a string");
    QuestionRecord q;
    q.id = rec["id"].get<std::string>();
    if (!seen.insert(q.id).second) throw DataError(path + ": duplicate question id " + q.id);

    std::ostringstream prompt;
    prompt << rec["question"].get<std::string>();
    if (rec.contains("options")) {
      if (!rec["options"].is_array() || rec["options"].size() < 2) fail("options", "needs >= 2 entries");
      for (std::size_t k = 0; k < rec["options"].size(); ++k) {
        std::string label(1, static_cast<char>('A' + k));
        q.labels.push_back(label);
        prompt << "\n(" << label << ") " << rec["options"][k].get<std::string>();
      }
    } else if (rec.contains("labels")) {
      if (!rec["labels"].is_array() || rec["labels"].size() < 2) fail("labels", "needs >= 2 entries");
      for (const auto& l : rec["labels"]) q.labels.push_back(l.get<std::string>());
    } else {
      fail("options", "missing (or provide 'labels')");
    }
    q.prompt = prompt.str();
    if (!rec.contains("gold") || !rec["gold"].is_string()) fail("gold", "missing or not a string");
    q.gold = rec["gold"].get<std::string>();
    bool gold_known = false;
    for (const auto& l : q.labels) gold_known |= (l == q.gold);
    if (!gold_known) fail("gold", "is not one of the answer labels");
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QuestionRecord> load_gsm8k_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  std::vector<QuestionRecord> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON line: " + e.what());
    }
    QuestionRecord q;
    q.free_form = true;
    q.id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                       : ("gsm8k-" + std::to_string(lineno));
    if (!seen.insert(q.id).second)
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate question id " + q.id);
    if (!rec.contains("question") || !rec["question"].is_string())
      throw DataError(path + ":" + std::to_string(lineno) + " [" + q.id + "]: field 'question' missing");
    q.prompt = rec["question"].get<std::string>();
    if (!rec.contains("answer") || !rec["answer"].is_string())
      throw DataError(path + ":" + std::to_string(lineno) + " [" + q.id + "]: field 'answer' missing");
    std::string answer = rec["answer"].get<std::string>();
    auto marker = answer.rfind("####");
    if (marker == std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) + " [" + q.id + "]: no '####' gold marker");
    auto canon = canonicalize_numeric(answer.substr(marker + 4));
    if (!canon)
      throw DataError(path + ":" + std::to_string(lineno) + " [" + q.id + "]: gold marker has no number");
    q.gold = *canon;
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

std::vector<QuestionRecord> load_dataset(const std::string& path, DatasetFormat format) {
  return format == DatasetFormat::mcq_json ? load_mcq_json(path) : load_gsm8k_lines(path);
}

}  // namespace mad
