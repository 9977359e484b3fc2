#include "mad/debate.hpp"

#include <algorithm>
#include <future>
#include <map>

#include "mad/errors.hpp"
#include "mad/sim.hpp"

namespace mad {

void DebateRunConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (n_agents != topology.n_agents()) throw ConfigError("topology does not match n_agents");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (persona_set.empty()) throw ConfigError("persona set must be nonempty");
}

namespace {

AgentTurn parse_turn(const ChatResult& result, const QuestionRecord& question) {
  AgentTurn turn;
  if (!result.ok) {
    turn.parse_status = "error";
    turn.error_message = result.error;
    return turn;
  }
  turn.raw_text = result.content;
  ParsedAnswer parsed = question.free_form ? parse_numeric_answer(result.content)
                                           : parse_answer(result.content, AnswerSpace(question.labels));
  turn.answer_label = parsed.label;
  turn.parse_status = to_string(parsed.status);
  return turn;
}

std::optional<std::string> majority_label(const std::vector<AgentTurn>& final_round,
                                          const QuestionRecord& question) {
  // Label -> deterministic index so the lowest-index tie-break is stable:
  // the label order of the question for MCQ, lexicographic for free-form.
  std::vector<std::string> order;
  if (!question.free_form) {
    order = question.labels;
  } else {
    for (const auto& turn : final_round)
      if (turn.answer_label) order.push_back(*turn.answer_label);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
  }
  std::map<std::string, int> index;
  for (int k = 0; k < static_cast<int>(order.size()); ++k) index[order[static_cast<std::size_t>(k)]] = k;

  std::vector<int> votes;
  for (const auto& turn : final_round) {
    if (!turn.answer_label) continue;
    auto it = index.find(*turn.answer_label);
    if (it != index.end()) votes.push_back(it->second);
  }
  if (votes.empty()) return std::nullopt;
  return order[static_cast<std::size_t>(majority_vote(votes))];
}

}  // namespace

QuestionDebate run_debate_question(const DebateRunConfig& config, const QuestionRecord& question,
                                   ChatBackend& backend) {
  config.validate();
  const int n = config.n_agents;
  const std::vector<std::string> personas =
      assign_personas(n, config.persona_assignment, config.persona_set);
  SeedSequence question_seq = SeedSequence(config.seed).child(question.id);

  QuestionDebate debate;
  debate.question_id = question.id;

  for (int t = 0; t <= config.rounds; ++t) {
    // Build all round-t prompts from round t-1 texts before issuing any
    // request: no same-round output can leak into a prompt.
    std::vector<ChatRequest> requests(static_cast<std::size_t>(n));
    std::vector<bool> skip(static_cast<std::size_t>(n), false);
    std::vector<AgentTurn> turns(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
      std::optional<std::string> self_text;
      std::vector<std::string> peer_texts;
      if (t > 0) {
        const auto& prev = debate.rounds[static_cast<std::size_t>(t - 1)];
        const AgentTurn& self_prev = prev[static_cast<std::size_t>(i)];
        if (self_prev.parse_status == "error") {
          turns[static_cast<std::size_t>(i)].parse_status = "error";
          turns[static_cast<std::size_t>(i)].error_message = "no prior response to debate from";
          skip[static_cast<std::size_t>(i)] = true;
          continue;
        }
        self_text = self_prev.raw_text;
        for (int j : config.topology.peers(i)) {
          const AgentTurn& peer_prev = prev[static_cast<std::size_t>(j)];
          if (peer_prev.parse_status != "error") peer_texts.push_back(peer_prev.raw_text);
        }
      }
      Rng prompt_rng(question_seq.child("prompt")
                         .child(static_cast<std::uint64_t>(i))
                         .child(static_cast<std::uint64_t>(t)));
      ChatRequest& req = requests[static_cast<std::size_t>(i)];
      req.messages.push_back({"system", personas[static_cast<std::size_t>(i)]});
      req.messages.push_back(
          {"user", build_prompt(question.prompt, config.mode, self_text, peer_texts, prompt_rng)});
      req.question_id = question.id;
      req.agent_id = i;
      req.round = t;
      req.answer_labels = question.labels;
    }

    // Fan out within the round up to the concurrency limit; the round
    // barrier is the loop structure itself.
    for (int base = 0; base < n; base += config.concurrency) {
      int limit = std::min(n, base + config.concurrency);
      std::vector<std::future<ChatResult>> futures;
      for (int i = base; i < limit; ++i) {
        if (skip[static_cast<std::size_t>(i)]) continue;
        futures.push_back(std::async(std::launch::async, [&backend, &requests, i] {
          return backend.complete(requests[static_cast<std::size_t>(i)]);
        }));
      }
      std::size_t f = 0;
      for (int i = base; i < limit; ++i) {
        if (skip[static_cast<std::size_t>(i)]) continue;
        turns[static_cast<std::size_t>(i)] = parse_turn(futures[f++].get(), question);
      }
    }

    for (const auto& turn : turns)
      if (turn.parse_status == "error") debate.partial = true;
    debate.rounds.push_back(std::move(turns));
  }

  debate.final_answer = majority_label(debate.rounds.back(), question);
  if (!debate.final_answer) debate.partial = true;
  return debate;
}

std::vector<QuestionDebate> run_debate(const DebateRunConfig& config,
                                       const std::vector<QuestionRecord>& questions,
                                       ChatBackend& backend) {
  std::vector<QuestionDebate> out;
  out.reserve(questions.size());
  for (const auto& q : questions) out.push_back(run_debate_question(config, q, backend));
  return out;
}

}  // namespace mad
