#include "mad/transcript_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include "mad/digest.hpp"
#include "mad/errors.hpp"

namespace mad {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Topology RunMeta::topology() const {
  if (topology_preset == "single-peer") return Topology::single_peer(n_agents);
  if (topology_preset == "full") return Topology::fully_connected(n_agents);
  throw ConfigError("unknown topology preset in run meta: " + topology_preset);
}

ordered_json to_json(const TranscriptRecord& r) {
  ordered_json j;
  j["type"] = "transcript";
  j["question_id"] = r.question_id;
  j["run_id"] = r.run_id;
  j["config_digest"] = r.config_digest;
  j["gold"] = r.gold;
  j["final_answer"] = r.final_answer;
  j["timestamp_ms"] = r.timestamp_ms;
  ordered_json rounds = ordered_json::array();
  for (const auto& round : r.rounds) {
    ordered_json agents = ordered_json::array();
    for (const auto& turn : round) {
      ordered_json t;
      t["answer"] = turn.answer;
      t["parse_status"] = turn.parse_status;
      t["raw_ref"] = turn.raw_ref;
      t["prompt_mode"] = turn.prompt_mode;
      agents.push_back(std::move(t));
    }
    rounds.push_back(std::move(agents));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

TranscriptRecord transcript_from_json(const ordered_json& j) {
  TranscriptRecord r;
  r.question_id = j.at("question_id").get<std::string>();
  r.run_id = j.at("run_id").get<std::string>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.gold = j.at("gold").get<std::string>();
  r.final_answer = j.at("final_answer").get<std::string>();
  r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
  for (const auto& round : j.at("rounds")) {
    std::vector<TurnRecord> agents;
    for (const auto& t : round) {
      TurnRecord turn;
      turn.answer = t.at("answer").get<std::string>();
      turn.parse_status = t.at("parse_status").get<std::string>();
      turn.raw_ref = t.at("raw_ref").get<std::string>();
      turn.prompt_mode = t.at("prompt_mode").get<std::string>();
      agents.push_back(std::move(turn));
    }
    r.rounds.push_back(std::move(agents));
  }
  return r;
}

namespace {

ordered_json meta_to_json(const RunMeta& m) {
  ordered_json j;
  j["type"] = "meta";
  j["config_digest"] = m.config_digest;
  j["n_agents"] = m.n_agents;
  j["rounds"] = m.rounds;
  j["topology"] = m.topology_preset;
  j["prompt_mode"] = m.prompt_mode;
  j["seed"] = m.seed;
  j["config"] = m.extra.is_null() ? ordered_json::object() : m.extra;
  return j;
}

RunMeta meta_from_json(const ordered_json& j) {
  RunMeta m;
  m.config_digest = j.at("config_digest").get<std::string>();
  m.n_agents = j.at("n_agents").get<int>();
  m.rounds = j.at("rounds").get<int>();
  m.topology_preset = j.at("topology").get<std::string>();
  m.prompt_mode = j.at("prompt_mode").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.extra = j.value("config", ordered_json::object());
  return m;
}

}  // namespace

void write_transcripts(const RunMeta& meta, const std::vector<TranscriptRecord>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open transcript file for writing: " + path);
  out << meta_to_json(meta).dump() << "\n";
  for (const auto& r : records) out << to_json(r).dump() << "\n";
  if (!out) throw DataError("write failed: " + path);
}

void append_transcripts(const std::vector<TranscriptRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot open transcript file for appending: " + path);
  for (const auto& r : records) out << to_json(r).dump() << "\n";
  if (!out) throw DataError("write failed: " + path);
}

TranscriptFile read_transcripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcript file: " + path);
  TranscriptFile file;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed transcript line: " + e.what());
    }
    try {
      std::string type = j.value("type", "transcript");
      if (type == "meta") {
        file.meta = meta_from_json(j);
      } else {
        file.records.push_back(transcript_from_json(j));
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": incomplete transcript record: " + e.what());
    }
  }
  // A final line without trailing newline that got truncated mid-object fails
  // the JSON parse above and is reported with its line number.
  return file;
}

std::string config_digest(const ordered_json& config) {
  return sha256_hex(config.dump()).substr(0, 16);
}

AnswerGrid answer_grid(const std::vector<TranscriptRecord>& records) {
  AnswerGrid grid;
  grid.reserve(records.size());
  for (const auto& r : records) {
    std::map<std::string, int> codes;
    std::vector<std::vector<int>> instance;
    for (const auto& round : r.rounds) {
      std::vector<int> answers;
      for (const auto& turn : round) {
        if (turn.answer.empty() || turn.parse_status == "failed" || turn.parse_status == "error") {
          answers.push_back(-1);
        } else {
          auto [it, _] = codes.emplace(turn.answer, static_cast<int>(codes.size()));
          answers.push_back(it->second);
        }
      }
      instance.push_back(std::move(answers));
    }
    grid.push_back(std::move(instance));
  }
  return grid;
}

ContentStore::ContentStore(std::string root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

std::string ContentStore::put(const std::string& text) {
  std::string ref = sha256_hex(text);
  fs::path dir = fs::path(root_) / ref.substr(0, 2);
  fs::create_directories(dir);
  fs::path file = dir / ref.substr(2);
  if (!fs::exists(file)) {
    std::ofstream out(file, std::ios::binary);
    out << text;
    if (!out) throw DataError("content store write failed: " + file.string());
  }
  return ref;
}

std::string ContentStore::get(const std::string& ref) const {
  fs::path file = fs::path(root_) / ref.substr(0, 2) / ref.substr(2);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("content store entry not found: " + ref);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace mad
