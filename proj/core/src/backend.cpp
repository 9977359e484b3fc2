#include "mad/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mad/errors.hpp"
#include "mad/prompt.hpp"
#include "mad/rng.hpp"

namespace mad {

using nlohmann::json;

void BackendConfig::validate() const {
  if (temperature <= 0.0 || temperature > 2.0) throw ConfigError("temperature must be in (0, 2]");
  if (top_p <= 0.0 || top_p > 1.0) throw ConfigError("nucleus p must be in (0, 1]");
  if (kind == Kind::http_openai_compatible) {
    if (endpoint.empty()) throw ConfigError("http backend requires an endpoint");
    if (model.empty()) throw ConfigError("http backend requires a model name");
  } else {
    if (mock_alpha.size() < 2) throw ConfigError("mock-dcm backend requires a belief template with K >= 2");
    if (mock_w_self <= 0.0 || mock_w_peer <= 0.0) throw ConfigError("mock-dcm weights must be positive");
  }
}

namespace {

struct PromptOpinions {
  std::optional<std::string> self_text;  // present only for standard prompts
  std::vector<std::string> opinions;     // peer texts (standard) or all texts (anonymized)
  bool any_context = false;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Recover the opinion blocks the prompt builder embedded, from the prompt
// text alone. The mock agent must not receive out-of-band information, or
// the hermetic end-to-end check proves nothing.
PromptOpinions split_prompt(const std::string& prompt) {
  PromptOpinions out;
  const std::string self_header = "This was your most recent opinion:";
  const std::string marker = "- Agent Opinion ";

  std::size_t section_end = prompt.find("\n\nInstructions:");
  if (section_end == std::string::npos) section_end = prompt.size();

  if (std::size_t self_at = prompt.find(self_header); self_at != std::string::npos) {
    out.any_context = true;
    std::size_t begin = prompt.find("- ", self_at);
    std::size_t end = prompt.find("\n\nBased on the following", self_at);
    if (begin != std::string::npos && end != std::string::npos && begin < end)
      out.self_text = trim(prompt.substr(begin + 2, end - begin - 2));
  }

  std::size_t pos = 0;
  std::vector<std::size_t> starts;
  while ((pos = prompt.find(marker, pos)) != std::string::npos && pos < section_end) {
    starts.push_back(pos);
    pos += marker.size();
  }
  for (std::size_t n = 0; n < starts.size(); ++n) {
    std::size_t text_at = prompt.find(": ", starts[n]);
    if (text_at == std::string::npos) continue;
    std::size_t end = n + 1 < starts.size() ? prompt.rfind("\n- ", starts[n + 1]) : section_end;
    if (end == std::string::npos || end <= text_at) end = section_end;
    out.opinions.push_back(trim(prompt.substr(text_at + 2, end - text_at - 2)));
    out.any_context = true;
  }
  return out;
}

}  // namespace

MockDcmBackend::MockDcmBackend(const BackendConfig& config) : config_(config) {
  config_.validate();
}

ChatResult MockDcmBackend::complete(const ChatRequest& request) {
  if (request.answer_labels.size() < 2)
    return {false, "", "mock-dcm backend requires a multiple-choice answer space", 1};
  AnswerSpace space(request.answer_labels);
  if (static_cast<int>(config_.mock_alpha.size()) != space.size())
    return {false, "", "mock-dcm belief template dimension does not match the answer space", 1};

  std::string prompt;
  for (const auto& m : request.messages)
    if (m.role == "user") prompt = m.content;
  PromptOpinions parsed = split_prompt(prompt);

  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(request.question_id, request.agent_id);
  auto it = beliefs_.find(key);
  if (it == beliefs_.end())
    it = beliefs_.emplace(key, BeliefState(config_.mock_alpha)).first;

  if (parsed.any_context) {
    std::vector<double> counts(config_.mock_alpha.size(), 0.0);
    if (parsed.self_text) {
      // Standard prompt: the self marker is visible, so the asymmetric
      // weights apply.
      ParsedAnswer self = parse_answer(*parsed.self_text, space);
      if (self.label)
        counts[static_cast<std::size_t>(space.index_of(*self.label))] += config_.mock_w_self;
      for (const auto& text : parsed.opinions) {
        ParsedAnswer peer = parse_answer(text, space);
        if (peer.label)
          counts[static_cast<std::size_t>(space.index_of(*peer.label))] += config_.mock_w_peer;
      }
    } else {
      // Anonymized prompt: identities are indistinguishable, so every
      // opinion gets the common mean weight.
      std::size_t n = parsed.opinions.size();
      double w = n == 0 ? 0.0
                        : (config_.mock_w_self + static_cast<double>(n - 1) * config_.mock_w_peer) /
                              static_cast<double>(n);
      for (const auto& text : parsed.opinions) {
        ParsedAnswer opinion = parse_answer(text, space);
        if (opinion.label)
          counts[static_cast<std::size_t>(space.index_of(*opinion.label))] += w;
      }
    }
    it->second = apply_update(it->second, UpdateCounts{std::move(counts)});
  }

  SeedSequence seq =
      SeedSequence(config_.mock_seed).child(request.question_id).child("agent").child(static_cast<std::uint64_t>(request.agent_id)).child("round").child(static_cast<std::uint64_t>(request.round));
  Rng rng(seq);
  int answer = sample_response(it->second, rng);

  ChatResult result;
  result.ok = true;
  result.content = "Let me reason step by step about the options. {final answer: (" +
                   space.label(answer) + ")}";
  return result;
}

HttpChatBackend::HttpChatBackend(const BackendConfig& config) : config_(config) {
  config_.validate();
  if (!config_.auth_env.empty()) {
    const char* token = std::getenv(config_.auth_env.c_str());
    if (token == nullptr || *token == '\0')
      throw ConfigError("auth token environment variable is not set: " + config_.auth_env);
    token_ = token;
  }
}

ChatResult HttpChatBackend::complete(const ChatRequest& request) {
  json body;
  body["model"] = config_.model;
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(messages);
  body["temperature"] = config_.temperature;
  body["top_p"] = config_.top_p;
  body["max_tokens"] = config_.max_tokens;
  const std::string payload = body.dump();

  ChatResult result;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    result.attempts = attempt;
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    auto res = client.Post(config_.path, headers, payload, "application/json");
    bool retryable = false;
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      retryable = true;
    } else if (res->status == 429 || res->status >= 500) {
      result.error = "server error: HTTP " + std::to_string(res->status);
      retryable = true;
    } else if (res->status != 200) {
      result.error = "request rejected: HTTP " + std::to_string(res->status) + " " + res->body;
      return result;
    } else {
      try {
        json reply = json::parse(res->body);
        result.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        result.ok = true;
        result.error.clear();
        return result;
      } catch (const json::exception& e) {
        result.error = std::string("malformed completion response: ") + e.what();
        return result;
      }
    }
    if (retryable && attempt < config_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_base_ms << (attempt - 1)));
    }
  }
  return result;
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendConfig::Kind::mock_dcm)
    return std::make_unique<MockDcmBackend>(config);
  return std::make_unique<HttpChatBackend>(config);
}

}  // namespace mad
