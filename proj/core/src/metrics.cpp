#include "mad/metrics.hpp"

#include <string>

#include "mad/errors.hpp"

namespace mad {

DisagreementPartition partition_peers(int self_prev_answer,
                                      const std::map<int, int>& peer_prev_answers) {
  DisagreementPartition part;
  for (const auto& [peer, answer] : peer_prev_answers) {
    if (answer == self_prev_answer) {
      part.agreeing.insert(peer);
    } else {
      part.disagreeing.insert(peer);
      part.disagreeing_answers.insert(answer);
    }
  }
  return part;
}

AnalyticBias analytic_single_peer(const BeliefState& belief_prev, int self_answer,
                                  int peer_answer, double w_self, double w_peer) {
  if (self_answer == peer_answer)
    throw UsageError("single-peer closed form is conditioned on disagreement (self == peer answer)");
  if (self_answer < 0 || self_answer >= belief_prev.size() || peer_answer < 0 ||
      peer_answer >= belief_prev.size())
    throw UsageError("answer index out of range");

  // Grouped to match the multi-peer accumulation order bit-for-bit.
  const double z = belief_prev.total_mass() + (w_self + w_peer);
  AnalyticBias out;
  out.conformity = (belief_prev.alpha(peer_answer) + w_peer) / z;
  out.obstinacy = (belief_prev.alpha(self_answer) + w_self) / z;
  out.decomposition.belief_difference = belief_prev.alpha(peer_answer) - belief_prev.alpha(self_answer);
  out.decomposition.identity_bias = w_peer - w_self;
  out.decomposition.denominator = z;
  return out;
}

AnalyticBias analytic_multi_peer(const BeliefState& belief_prev, int self_answer,
                                 const std::map<int, int>& peer_answers,
                                 const IdentityWeightProfile& weights) {
  if (self_answer < 0 || self_answer >= belief_prev.size())
    throw UsageError("self answer index out of range");
  DisagreementPartition part = partition_peers(self_answer, peer_answers);
  if (part.n_d() == 0) throw UsageError("multi-peer closed form requires at least one disagreeing peer");

  // W^(k): aggregate peer weight for answer k; W_A: weight of agreeing peers.
  std::map<int, double> w_by_answer;
  double w_total = weights.self_weight;
  for (const auto& [peer, answer] : peer_answers) {
    if (answer < 0 || answer >= belief_prev.size()) throw UsageError("peer answer index out of range");
    auto it = weights.peer_weights.find(peer);
    if (it == weights.peer_weights.end())
      throw ConfigError("no identity weight configured for peer " + std::to_string(peer));
    w_by_answer[answer] += it->second;
    w_total += it->second;
  }
  double w_agree = 0.0;
  auto agree_it = w_by_answer.find(self_answer);
  if (agree_it != w_by_answer.end()) w_agree = agree_it->second;

  const double z = belief_prev.total_mass() + w_total;
  AnalyticBias out;
  double conf = 0.0, belief_diff_sum = 0.0, identity_sum = 0.0;
  for (int k : part.disagreeing_answers) {
    conf += (belief_prev.alpha(k) + w_by_answer.at(k)) / z;
    belief_diff_sum += belief_prev.alpha(k);
    identity_sum += w_by_answer.at(k);
  }
  out.conformity = conf;
  out.obstinacy = (belief_prev.alpha(self_answer) + weights.self_weight + w_agree) / z;
  out.decomposition.belief_difference = belief_diff_sum - belief_prev.alpha(self_answer);
  out.decomposition.identity_bias = identity_sum - weights.self_weight - w_agree;
  out.decomposition.denominator = z;
  return out;
}

std::optional<double> identity_bias_coefficient(std::optional<double> delta_vanilla,
                                                std::optional<double> delta_anonymized) {
  if (!delta_vanilla || !delta_anonymized) return std::nullopt;
  return *delta_vanilla - *delta_anonymized;
}

PeerSelector first_peer_selector() {
  return [](int agent, const std::vector<int>& peers) -> int {
    if (peers.empty()) throw ConfigError("agent " + std::to_string(agent) + " has no peers");
    return peers.front();
  };
}

namespace {

void check_round(const AnswerGrid& answers, int round) {
  if (round < 1) throw UsageError("estimators need round >= 1 (they look back one round)");
  for (const auto& instance : answers)
    if (static_cast<std::size_t>(round) >= instance.size())
      throw UsageError("round " + std::to_string(round) + " not present in transcript");
}

BiasReport make_report(long conf_hits, long obst_hits, long events) {
  BiasReport r;
  r.event_count = events;
  if (events > 0) {
    r.conformity = static_cast<double>(conf_hits) / static_cast<double>(events);
    r.obstinacy = static_cast<double>(obst_hits) / static_cast<double>(events);
    r.delta = *r.conformity - *r.obstinacy;
  }
  return r;
}

}  // namespace

BiasReport estimate_conformity_obstinacy(const AnswerGrid& answers, int round,
                                         const Topology& topology,
                                         const PeerSelector& peer_selector) {
  check_round(answers, round);
  long conf_hits = 0, obst_hits = 0, events = 0;
  for (const auto& instance : answers) {
    const auto& prev = instance[static_cast<std::size_t>(round - 1)];
    const auto& curr = instance[static_cast<std::size_t>(round)];
    for (int i = 0; i < topology.n_agents(); ++i) {
      int j = peer_selector(i, topology.peers(i));
      int y_self_prev = prev[static_cast<std::size_t>(i)];
      int y_peer_prev = prev[static_cast<std::size_t>(j)];
      int y_self = curr[static_cast<std::size_t>(i)];
      if (y_self_prev < 0 || y_peer_prev < 0 || y_self < 0) continue;  // failed parse: drop event
      if (y_self_prev == y_peer_prev) continue;
      ++events;
      if (y_self == y_peer_prev) ++conf_hits;
      if (y_self == y_self_prev) ++obst_hits;
    }
  }
  return make_report(conf_hits, obst_hits, events);
}

BiasReport multi_peer_estimators(const AnswerGrid& answers, int round,
                                 const Topology& topology, const StratumFilter& stratum) {
  check_round(answers, round);
  long conf_hits = 0, obst_hits = 0, events = 0;
  for (const auto& instance : answers) {
    const auto& prev = instance[static_cast<std::size_t>(round - 1)];
    const auto& curr = instance[static_cast<std::size_t>(round)];
    for (int i = 0; i < topology.n_agents(); ++i) {
      int y_self_prev = prev[static_cast<std::size_t>(i)];
      int y_self = curr[static_cast<std::size_t>(i)];
      if (y_self_prev < 0 || y_self < 0) continue;
      std::map<int, int> peer_prev;
      bool usable = true;
      for (int j : topology.peers(i)) {
        int y = prev[static_cast<std::size_t>(j)];
        if (y < 0) { usable = false; break; }
        peer_prev[j] = y;
      }
      if (!usable) continue;
      DisagreementPartition part = partition_peers(y_self_prev, peer_prev);
      if (part.n_d() == 0) continue;
      if (stratum.n_d && part.n_d() != *stratum.n_d) continue;
      if (stratum.n_a && part.n_a() != *stratum.n_a) continue;
      ++events;
      if (part.disagreeing_answers.count(y_self) > 0) ++conf_hits;
      if (y_self == y_self_prev) ++obst_hits;
    }
  }
  return make_report(conf_hits, obst_hits, events);
}

}  // namespace mad
