#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mad/backend.hpp"
#include "mad/dataset.hpp"
#include "mad/prompt.hpp"
#include "mad/topology.hpp"

namespace mad {

struct DebateRunConfig {
  int n_agents = 2;
  Topology topology = Topology::single_peer(2);
  int rounds = 1;
  PromptMode mode;
  PersonaAssignment persona_assignment = PersonaAssignment::homogeneous;
  std::vector<std::string> persona_set = {"Assistant"};
  std::uint64_t seed = 0;
  int concurrency = 4;

  void validate() const;
};

struct AgentTurn {
  std::string raw_text;
  std::optional<std::string> answer_label;
  std::string parse_status;  // matched | fallback | failed | error
  std::string error_message; // transport failure after retries
};

struct QuestionDebate {
  std::string question_id;
  std::vector<std::vector<AgentTurn>> rounds;  // [round][agent], round 0 first
  std::optional<std::string> final_answer;     // majority over final-round parses
  bool partial = false;                        // some agent turn errored
};

// Simultaneous-talk debate over one question: round 0 is the bare question;
// each later round builds every agent's prompt from round t-1 texts before
// any round-t completion is requested.
QuestionDebate run_debate_question(const DebateRunConfig& config, const QuestionRecord& question,
                                   ChatBackend& backend);

std::vector<QuestionDebate> run_debate(const DebateRunConfig& config,
                                       const std::vector<QuestionRecord>& questions,
                                       ChatBackend& backend);

}  // namespace mad
