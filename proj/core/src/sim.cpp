#include "mad/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mad/errors.hpp"

namespace mad {

std::vector<IdentityWeightProfile> SimConfig::effective_weights() const {
  const int n = topology.n_agents();
  if (weights.empty()) throw ConfigError("no identity weights configured");
  if (static_cast<int>(weights.size()) != n && weights.size() != 1)
    throw ConfigError("weights must have one entry or one per agent");

  std::vector<IdentityWeightProfile> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const IdentityWeightProfile& base = weights.size() == 1 ? weights[0] : weights[static_cast<std::size_t>(i)];
    IdentityWeightProfile p;
    p.self_weight = base.self_weight;
    // Template peer weight: first configured value, else the self weight.
    double w_peer = base.peer_weights.empty() ? base.self_weight : base.peer_weights.begin()->second;
    for (int j : topology.peers(i)) {
      auto it = base.peer_weights.find(j);
      p.peer_weights[j] = it != base.peer_weights.end() ? it->second : w_peer;
    }
    if (anonymized) p = p.symmetrized();
    out.push_back(std::move(p));
  }
  return out;
}

BeliefState SimConfig::initial_belief(int agent) const {
  if (init_alphas.empty()) throw ConfigError("no initial beliefs configured");
  if (init_alphas.size() == 1) return init_alphas[0];
  if (agent < 0 || agent >= static_cast<int>(init_alphas.size()))
    throw ConfigError("no initial belief for agent " + std::to_string(agent));
  return init_alphas[static_cast<std::size_t>(agent)];
}

void SimConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  for (int i = 0; i < topology.n_agents(); ++i) {
    if (initial_belief(i).size() != answer_space.size())
      throw ConfigError("initial belief dimension does not match answer space");
  }
  (void)effective_weights();
}

namespace {

void run_trial(const SimConfig& config, const std::vector<IdentityWeightProfile>& weights,
               int trial, std::vector<std::vector<int>>& grid) {
  const int n = config.topology.n_agents();
  SeedSequence trial_seq = SeedSequence(config.seed).child("trial").child(static_cast<std::uint64_t>(trial));

  std::vector<BeliefState> beliefs;
  std::vector<Rng> rngs;
  beliefs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    beliefs.push_back(config.initial_belief(i));
    rngs.emplace_back(trial_seq.child("agent").child(static_cast<std::uint64_t>(i)));
  }

  grid.assign(static_cast<std::size_t>(config.rounds + 1), std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int i = 0; i < n; ++i)
    grid[0][static_cast<std::size_t>(i)] = sample_response(beliefs[static_cast<std::size_t>(i)], rngs[static_cast<std::size_t>(i)]);

  for (int t = 1; t <= config.rounds; ++t) {
    const std::vector<int>& prev = grid[static_cast<std::size_t>(t - 1)];
    // All updates read round t-1 only: simultaneous talk, no intra-round leakage.
    std::vector<BeliefState> next_beliefs;
    next_beliefs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::map<int, int> peer_answers;
      for (int j : config.topology.peers(i)) peer_answers[j] = prev[static_cast<std::size_t>(j)];
      UpdateCounts c = build_update_counts(config.answer_space, prev[static_cast<std::size_t>(i)],
                                           peer_answers, weights[static_cast<std::size_t>(i)]);
      next_beliefs.push_back(apply_update(beliefs[static_cast<std::size_t>(i)], c));
    }
    beliefs = std::move(next_beliefs);
    for (int i = 0; i < n; ++i)
      grid[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] =
          sample_response(beliefs[static_cast<std::size_t>(i)], rngs[static_cast<std::size_t>(i)]);
  }
}

}  // namespace

SimTranscript run_simulation(const SimConfig& config) {
  config.validate();
  const std::vector<IdentityWeightProfile> weights = config.effective_weights();

  SimTranscript out;
  out.n_agents = config.topology.n_agents();
  out.rounds = config.rounds;
  out.seed = config.seed;
  out.answers.resize(static_cast<std::size_t>(config.trials));

  // Trials are independent; results land in their own slots, so the merge is
  // deterministic by trial index.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int n_threads = static_cast<int>(std::min<std::uint64_t>(hw, static_cast<std::uint64_t>(config.trials)));
  if (n_threads <= 1 || config.trials < 4) {
    for (int trial = 0; trial < config.trials; ++trial)
      run_trial(config, weights, trial, out.answers[static_cast<std::size_t>(trial)]);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        for (int trial = w; trial < config.trials; trial += n_threads)
          run_trial(config, weights, trial, out.answers[static_cast<std::size_t>(trial)]);
      });
    }
    for (auto& th : workers) th.join();
  }
  return out;
}

int majority_vote(const std::vector<int>& answers) {
  if (answers.empty()) throw UsageError("majority vote over empty answer list");
  int max_answer = *std::max_element(answers.begin(), answers.end());
  std::vector<int> counts(static_cast<std::size_t>(max_answer) + 1, 0);
  for (int a : answers) {
    if (a < 0) throw UsageError("majority vote over invalid answer index");
    counts[static_cast<std::size_t>(a)]++;
  }
  int best = 0;
  for (int k = 1; k <= max_answer; ++k)
    if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)]) best = k;
  return best;
}

DriftEstimate one_step_predictive_drift(const BeliefState& belief,
                                        const IdentityWeightProfile& weights,
                                        std::int64_t n_trials, Rng& rng,
                                        std::optional<int> forced_peer_answer) {
  const std::size_t k_dim = belief.alpha().size();
  const std::vector<double> p0 = predictive_distribution(belief);
  std::vector<double> sum(k_dim, 0.0), sum_sq(k_dim, 0.0);

  const double z_next = belief.total_mass() + weights.total();
  for (std::int64_t trial = 0; trial < n_trials; ++trial) {
    std::vector<double> a = belief.alpha();
    int self = rng.categorical(p0);
    a[static_cast<std::size_t>(self)] += weights.self_weight;
    for (const auto& [_, w] : weights.peer_weights) {
      int peer = forced_peer_answer ? *forced_peer_answer : rng.categorical(p0);
      a[static_cast<std::size_t>(peer)] += w;
    }
    for (std::size_t k = 0; k < k_dim; ++k) {
      double d = a[k] / z_next - p0[k];
      sum[k] += d;
      sum_sq[k] += d * d;
    }
  }

  DriftEstimate est;
  est.drift.resize(k_dim);
  est.std_error.resize(k_dim);
  const double n = static_cast<double>(n_trials);
  for (std::size_t k = 0; k < k_dim; ++k) {
    est.drift[k] = sum[k] / n;
    double var = std::max(0.0, sum_sq[k] / n - est.drift[k] * est.drift[k]);
    est.std_error[k] = std::sqrt(var / n);
  }
  return est;
}

}  // namespace mad
