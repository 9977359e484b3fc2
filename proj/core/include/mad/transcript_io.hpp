#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mad/metrics.hpp"
#include "mad/topology.hpp"

namespace mad {

// One agent turn as persisted: the answer label plus provenance.
struct TurnRecord {
  std::string answer;        // canonical label; empty when the parse failed
  std::string parse_status;  // matched | fallback | failed | sampled | error
  std::string raw_ref;       // content-store hash of the raw completion, or empty
  std::string prompt_mode;   // standard | anonymized | sim
};

struct TranscriptRecord {
  std::string question_id;
  std::string run_id;
  std::string config_digest;
  std::string gold;  // empty when unknown
  std::string final_answer;
  std::int64_t timestamp_ms = 0;
  std::vector<std::vector<TurnRecord>> rounds;  // [round][agent], round 0 first
};

// Run-level header stored as the first JSONL line so analysis can rebuild
// the topology without the original command line.
struct RunMeta {
  std::string config_digest;
  int n_agents = 0;
  int rounds = 0;
  std::string topology_preset;  // "single-peer" | "full"
  std::string prompt_mode;
  std::uint64_t seed = 0;
  nlohmann::ordered_json extra;  // free-form config snapshot

  Topology topology() const;
};

struct TranscriptFile {
  std::optional<RunMeta> meta;
  std::vector<TranscriptRecord> records;
};

// JSONL, one record per line, UTF-8, fixed key order. A truncated or
// malformed line raises DataError with its line number.
void write_transcripts(const RunMeta& meta, const std::vector<TranscriptRecord>& records,
                       const std::string& path);
void append_transcripts(const std::vector<TranscriptRecord>& records, const std::string& path);
TranscriptFile read_transcripts(const std::string& path);

nlohmann::ordered_json to_json(const TranscriptRecord& record);
TranscriptRecord transcript_from_json(const nlohmann::ordered_json& j);

// Stable digest of a config snapshot: identical configs agree across runs,
// any field change produces a different value.
std::string config_digest(const nlohmann::ordered_json& config);

// Answer-label grid over records, with labels mapped to integer codes per
// answer-equality only; failed parses become -1.
AnswerGrid answer_grid(const std::vector<TranscriptRecord>& records);

// Content-addressed sidecar directory for raw completion texts.
class ContentStore {
 public:
  explicit ContentStore(std::string root);
  std::string put(const std::string& text);  // returns sha256 hex ref
  std::string get(const std::string& ref) const;

 private:
  std::string root_;
};

}  // namespace mad
