#include "mad/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <sstream>

#include "mad/errors.hpp"

namespace mad {

namespace {

const char* kInstructionsHeader =
    "Instructions: Consider these agents' opinions to provide an updated response to the question.";
const char* kFinalAnswerInstruction =
    "First, briefly state your step-by-step reasoning. Then, make sure to state your final answer "
    "in curly brackets at the very end of your response, just like: \"{final answer: (A)}\".";

bool iequals(const std::string& a, const std::string& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Last label (by position) occurring as a standalone token in `text`.
std::optional<std::pair<std::string, std::string>> last_label_token(const std::string& text,
                                                                    const AnswerSpace& space) {
  std::optional<std::pair<std::string, std::string>> found;  // (canonical label, raw token)
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalnum(static_cast<unsigned char>(text[i]))) { ++i; continue; }
    std::size_t j = i;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                               text[j] == '.' || text[j] == ',' || text[j] == '-'))
      ++j;
    std::string token = text.substr(i, j - i);
    while (!token.empty() && (token.back() == '.' || token.back() == ',')) token.pop_back();
    for (const std::string& label : space.labels()) {
      if (iequals(token, label)) {
        found = {label, token};
        break;
      }
    }
    i = j;
  }
  return found;
}

// Inner text of the last "{final answer: ...}" block, if any.
std::optional<std::string> last_final_answer_block(const std::string& completion) {
  static const std::regex pattern(R"(\{\s*final\s+answer\s*:?\s*([^{}]*)\})", std::regex::icase);
  std::optional<std::string> inner;
  auto begin = std::sregex_iterator(completion.begin(), completion.end(), pattern);
  for (auto it = begin; it != std::sregex_iterator(); ++it) inner = (*it)[1].str();
  return inner;
}

}  // namespace

std::string to_string(PromptVariant v) {
  return v == PromptVariant::standard ? "standard" : "anonymized";
}

PromptVariant prompt_variant_from_string(const std::string& s) {
  if (s == "standard") return PromptVariant::standard;
  if (s == "anonymized") return PromptVariant::anonymized;
  throw ConfigError("unknown prompt mode: " + s);
}

std::string to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::matched: return "matched";
    case ParseStatus::fallback: return "fallback";
    default: return "failed";
  }
}

std::string build_prompt(const std::string& question, const PromptMode& mode,
                         const std::optional<std::string>& self_response,
                         const std::vector<std::string>& peer_responses, Rng& rng) {
  std::ostringstream out;
  out << question << "\n\n";

  const bool first_round = !self_response && peer_responses.empty();
  if (first_round) {
    out << kFinalAnswerInstruction;
    return out.str();
  }

  if (mode.variant == PromptVariant::standard) {
    if (!self_response)
      throw UsageError("standard debate prompt requires the agent's previous response");
    out << "This was your most recent opinion:\n\n- " << *self_response << "\n\n";
    out << "Based on the following other agents' opinions:\n\n";
    for (std::size_t n = 0; n < peer_responses.size(); ++n)
      out << "- Agent Opinion " << (n + 1) << ": " << peer_responses[n] << "\n\n";
  } else {
    // Self and peers are indistinguishable: one shuffled opinion list with a
    // fresh order draw per prompt build.
    std::vector<std::string> opinions;
    if (self_response) opinions.push_back(*self_response);
    opinions.insert(opinions.end(), peer_responses.begin(), peer_responses.end());
    rng.shuffle(opinions);
    out << "Based on the following opinions from agents:\n\n";
    for (std::size_t n = 0; n < opinions.size(); ++n)
      out << "- Agent Opinion " << (n + 1) << ": " << opinions[n] << "\n\n";
  }

  out << kInstructionsHeader << "\n\n" << kFinalAnswerInstruction;
  return out.str();
}

ParsedAnswer parse_answer(const std::string& completion, const AnswerSpace& space) {
  ParsedAnswer result;
  if (auto inner = last_final_answer_block(completion)) {
    if (auto hit = last_label_token(*inner, space)) {
      result.label = hit->first;
      result.raw_span = *inner;
      result.status = ParseStatus::matched;
      return result;
    }
  }
  if (auto hit = last_label_token(completion, space)) {
    result.label = hit->first;
    result.raw_span = hit->second;
    result.status = ParseStatus::fallback;
    return result;
  }
  return result;
}

ParsedAnswer parse_numeric_answer(const std::string& completion) {
  ParsedAnswer result;
  if (auto inner = last_final_answer_block(completion)) {
    if (auto canon = canonicalize_numeric(*inner)) {
      result.label = *canon;
      result.raw_span = *inner;
      result.status = ParseStatus::matched;
      return result;
    }
  }
  if (auto canon = canonicalize_numeric(completion)) {
    result.label = *canon;
    result.raw_span = *canon;
    result.status = ParseStatus::fallback;
    return result;
  }
  return result;
}

std::optional<std::string> canonicalize_numeric(const std::string& text) {
  static const std::regex number(R"([-+]?\d[\d,]*(?:\.\d+)?)");
  std::optional<std::string> last;
  auto begin = std::sregex_iterator(text.begin(), text.end(), number);
  for (auto it = begin; it != std::sregex_iterator(); ++it) last = it->str();
  if (!last) return std::nullopt;

  std::string s = *last;
  s.erase(std::remove(s.begin(), s.end(), ','), s.end());
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(s.begin());
  }
  std::string integer = s, fraction;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    integer = s.substr(0, dot);
    fraction = s.substr(dot + 1);
  }
  while (integer.size() > 1 && integer.front() == '0') integer.erase(integer.begin());
  while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();

  std::string canon = integer;
  if (!fraction.empty()) canon += "." + fraction;
  if (canon == "0" || canon == "0.") negative = false;  // normalize -0
  return (negative ? "-" : "") + canon;
}

const std::vector<std::string>& default_persona_ids() {
  static const std::vector<std::string> ids = {"Assistant", "Doctor", "Psychologist",
                                               "Mathematician", "Programmer"};
  return ids;
}

const std::string& persona_template(const std::string& id) {
  static const std::map<std::string, std::string> templates = {
      {"Assistant",
       "You are a super-intelligent AI assistant capable of performing tasks more effectively "
       "than humans."},
      {"Doctor",
       "You are a doctor and come up with creative treatments for illnesses or diseases. You are "
       "able to recommend conventional medicines, herbal remedies and other natural alternatives. "
       "You also consider the patient's age, lifestyle and medical history when providing your "
       "recommendations."},
      {"Psychologist",
       "You are a psychologist. You are good at psychology, sociology, and philosophy. You give "
       "people scientific suggestions that will make them feel better."},
      {"Mathematician",
       "You are a mathematician. You are good at math games, arithmetic calculation, and "
       "long-term planning."},
      {"Programmer",
       "You are a programmer. You are good at computer science, engineering, and physics. You "
       "have experience in designing and developing computer software and hardware."},
  };
  auto it = templates.find(id);
  if (it == templates.end()) throw ConfigError("unknown persona id: " + id);
  return it->second;
}

std::vector<std::string> assign_personas(int n_agents, PersonaAssignment mode,
                                         const std::vector<std::string>& persona_set) {
  if (persona_set.empty()) throw ConfigError("persona set must be nonempty");
  std::vector<std::string> prompts;
  prompts.reserve(static_cast<std::size_t>(n_agents));
  for (int i = 0; i < n_agents; ++i) {
    const std::string& id = mode == PersonaAssignment::homogeneous
                                ? persona_set.front()
                                : persona_set[static_cast<std::size_t>(i) % persona_set.size()];
    prompts.push_back(persona_template(id));
  }
  return prompts;
}

}  // namespace mad
