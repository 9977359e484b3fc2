#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mad/belief.hpp"
#include "mad/rng.hpp"

namespace mad {

enum class PromptVariant { standard, anonymized };

struct PromptMode {
  PromptVariant variant = PromptVariant::standard;
  std::optional<std::string> persona;
};

std::string to_string(PromptVariant v);
PromptVariant prompt_variant_from_string(const std::string& s);

// Debate prompt for one agent. Round 0 passes no prior responses and yields
// question + instructions only. Standard mode labels the agent's own prior
// response; anonymized mode mixes self and peers into one shuffled,
// unattributed opinion list.
std::string build_prompt(const std::string& question, const PromptMode& mode,
                         const std::optional<std::string>& self_response,
                         const std::vector<std::string>& peer_responses, Rng& rng);

enum class ParseStatus { matched, fallback, failed };

struct ParsedAnswer {
  std::optional<std::string> label;
  std::string raw_span;
  ParseStatus status = ParseStatus::failed;
};

std::string to_string(ParseStatus s);

// Extract the final answer from a completion. Matched: last
// "{final answer: (X)}" pattern with a recognized label. Fallback: last
// standalone recognized label. Never throws; failure is a status.
ParsedAnswer parse_answer(const std::string& completion, const AnswerSpace& space);

// Free-form numeric variant: the label is the canonicalized number.
ParsedAnswer parse_numeric_answer(const std::string& completion);

// Strip commas, currency/unit decoration and leading zeros; normalize sign.
// Returns nullopt when no number is present.
std::optional<std::string> canonicalize_numeric(const std::string& text);

enum class PersonaAssignment { homogeneous, heterogeneous };

// Ordered persona ids used by round-robin heterogeneous assignment.
const std::vector<std::string>& default_persona_ids();
// Built-in system-prompt template for a persona id; throws ConfigError if unknown.
const std::string& persona_template(const std::string& id);

// Per-agent system prompts. Homogeneous repeats one persona; heterogeneous
// cycles through the ordered set.
std::vector<std::string> assign_personas(int n_agents, PersonaAssignment mode,
                                         const std::vector<std::string>& persona_set);

}  // namespace mad
