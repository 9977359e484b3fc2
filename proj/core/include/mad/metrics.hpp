#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "mad/belief.hpp"
#include "mad/sim.hpp"
#include "mad/topology.hpp"

namespace mad {

// Peers split by whether their previous answer disagreed with the agent's.
struct DisagreementPartition {
  std::set<int> disagreeing;         // D(i)
  std::set<int> agreeing;            // A(i)
  std::set<int> disagreeing_answers; // Y_D(i), answer indices
  int n_d() const { return static_cast<int>(disagreeing.size()); }
  int n_a() const { return static_cast<int>(agreeing.size()); }
};

DisagreementPartition partition_peers(int self_prev_answer,
                                      const std::map<int, int>& peer_prev_answers);

// Conformity/Obstinacy/Delta with their event count; metrics are absent when
// no disagreement event was observed.
struct BiasReport {
  std::optional<double> conformity;
  std::optional<double> obstinacy;
  std::optional<double> delta;
  long event_count = 0;
  std::map<int, BiasReport> per_round;
  std::optional<double> ibc;
};

// The two braces of the Delta closed form, over the post-update total mass.
struct DeltaDecomposition {
  double belief_difference = 0.0;
  double identity_bias = 0.0;
  double denominator = 0.0;
  double delta() const { return (belief_difference + identity_bias) / denominator; }
};

struct AnalyticBias {
  double conformity = 0.0;
  double obstinacy = 0.0;
  DeltaDecomposition decomposition;
};

// Closed forms for the single-peer disagreement event.
AnalyticBias analytic_single_peer(const BeliefState& belief_prev, int self_answer,
                                  int peer_answer, double w_self, double w_peer);

// Closed forms for the general multi-peer event; requires at least one
// disagreeing peer. Reduces bit-exactly to the single-peer form when
// n_D = 1, n_A = 0.
AnalyticBias analytic_multi_peer(const BeliefState& belief_prev, int self_answer,
                                 const std::map<int, int>& peer_answers,
                                 const IdentityWeightProfile& weights);

std::optional<double> identity_bias_coefficient(std::optional<double> delta_vanilla,
                                                std::optional<double> delta_anonymized);

// answers[instance][round][agent]; negative entries mark unusable answers
// (failed parses) and the enclosing event is dropped from conditioning.
using AnswerGrid = std::vector<std::vector<std::vector<int>>>;

using PeerSelector = std::function<int(int agent, const std::vector<int>& peers)>;
PeerSelector first_peer_selector();

// Pooled single-peer ML estimators at round t (events pooled across
// instances and agents, a single ratio).
BiasReport estimate_conformity_obstinacy(const AnswerGrid& answers, int round,
                                         const Topology& topology,
                                         const PeerSelector& peer_selector = first_peer_selector());

// Optional stratum filter: only events with exactly (n_D, n_A) are counted.
struct StratumFilter {
  std::optional<int> n_d;
  std::optional<int> n_a;
};

BiasReport multi_peer_estimators(const AnswerGrid& answers, int round,
                                 const Topology& topology,
                                 const StratumFilter& stratum = {});

}  // namespace mad
