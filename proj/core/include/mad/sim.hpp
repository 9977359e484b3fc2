#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mad/belief.hpp"
#include "mad/topology.hpp"

namespace mad {

struct SimConfig {
  AnswerSpace answer_space;
  Topology topology;
  int rounds = 1;
  // One belief per agent; a single entry is used as a shared template.
  std::vector<BeliefState> init_alphas;
  // One profile per agent; a single entry is broadcast (peer ids filled from
  // the topology with the entry's self/first-peer weights).
  std::vector<IdentityWeightProfile> weights;
  bool anonymized = false;
  int trials = 1;
  std::uint64_t seed = 0;

  // Per-agent weights after anonymization symmetrization, validated against
  // the topology.
  std::vector<IdentityWeightProfile> effective_weights() const;
  BeliefState initial_belief(int agent) const;
  void validate() const;
};

// Complete answer grid: answers[trial][round][agent], rounds 0..T inclusive.
struct SimTranscript {
  int n_agents = 0;
  int rounds = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::vector<int>>> answers;
};

SimTranscript run_simulation(const SimConfig& config);

// Modal answer; ties broken by lowest answer index.
int majority_vote(const std::vector<int>& answers);

struct DriftEstimate {
  std::vector<double> drift;      // mean of p_{t+1} - p_t componentwise
  std::vector<double> std_error;  // standard error of each mean
};

// One-step expected change of the predictive distribution when the agent and
// every peer in `weights` draw from the same predictive. `forced_peer_answer`
// replaces all peer draws with a constant answer (the martingale-breaking
// control).
DriftEstimate one_step_predictive_drift(const BeliefState& belief,
                                        const IdentityWeightProfile& weights,
                                        std::int64_t n_trials, Rng& rng,
                                        std::optional<int> forced_peer_answer = std::nullopt);

}  // namespace mad
