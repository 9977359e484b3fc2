#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mad/belief.hpp"

namespace mad {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  // Metadata for stateful/hermetic backends; ignored by HTTP transports.
  std::string question_id;
  int agent_id = 0;
  int round = 0;
  std::vector<std::string> answer_labels;  // empty for free-form tasks
};

struct ChatResult {
  bool ok = false;
  std::string content;
  std::string error;
  int attempts = 1;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Must not throw on transport failure; report it through the result.
  virtual ChatResult complete(const ChatRequest& request) = 0;
};

struct BackendConfig {
  enum class Kind { http_openai_compatible, mock_dcm };
  Kind kind = Kind::mock_dcm;

  // http-openai-compatible
  std::string endpoint;                      // e.g. http://localhost:8080
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string auth_env;                      // env var holding the bearer token
  int timeout_seconds = 120;
  int max_tokens = 2048;
  double temperature = 1.0;
  double top_p = 0.9;
  int max_attempts = 3;
  int backoff_base_ms = 250;

  // mock-dcm
  std::vector<double> mock_alpha = {1.0, 1.0};  // initial belief template
  double mock_w_self = 1.0;
  double mock_w_peer = 1.0;
  std::uint64_t mock_seed = 0;

  void validate() const;
};

// Hermetic DCM agent behind the chat interface. It re-parses the opinions
// embedded in the prompt, applies the identity-weighted belief update
// (symmetric weights when the prompt carries no self marker), and emits
// "{final answer: (X)}" completions. Exercises the full prompt/parse path
// without any model.
class MockDcmBackend : public ChatBackend {
 public:
  explicit MockDcmBackend(const BackendConfig& config);
  ChatResult complete(const ChatRequest& request) override;

 private:
  BackendConfig config_;
  std::mutex mutex_;
  std::map<std::pair<std::string, int>, BeliefState> beliefs_;
};

// OpenAI-compatible chat-completions client with bounded retries and
// exponential backoff on transport errors.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(const BackendConfig& config);  // throws if the token env is missing
  ChatResult complete(const ChatRequest& request) override;

 private:
  BackendConfig config_;
  std::string host_;
  int port_ = 80;
  std::string token_;
};

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config);

}  // namespace mad
