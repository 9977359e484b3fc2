#pragma once

#include <map>
#include <string>
#include <vector>

#include "mad/rng.hpp"

namespace mad {

// The K answer options an agent chooses among. Labels are opaque strings
// ("A".."D", or canonical numeric strings for free-form tasks).
class AnswerSpace {
 public:
  explicit AnswerSpace(std::vector<std::string> labels);
  static AnswerSpace letters(int k);  // "A", "B", ...

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int index) const;
  // -1 when the label is not part of the space.
  int index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

// Dirichlet parameter vector over the K options: the agent's internal belief.
class BeliefState {
 public:
  explicit BeliefState(std::vector<double> alpha);
  static BeliefState uniform(int k, double mass = 1.0);

  int size() const { return static_cast<int>(alpha_.size()); }
  const std::vector<double>& alpha() const { return alpha_; }
  double alpha(int k) const { return alpha_[static_cast<std::size_t>(k)]; }
  double total_mass() const;  // ||alpha||_1

 private:
  std::vector<double> alpha_;
};

// A point on the simplex drawn from the belief.
struct BeliefSample {
  std::vector<double> theta;
};

// Per-identity update weights: how strongly the agent counts its own answer
// versus each peer's.
struct IdentityWeightProfile {
  double self_weight = 1.0;
  std::map<int, double> peer_weights;

  static IdentityWeightProfile homogeneous(double w, const std::vector<int>& peers);
  // All weights forced to their common mean: the anonymized regime.
  IdentityWeightProfile symmetrized() const;
  double total() const;
  bool is_symmetric(double tol = 0.0) const;
};

// Weighted answer counts accumulated from one observation round.
struct UpdateCounts {
  std::vector<double> counts;

  UpdateCounts& operator+=(const UpdateCounts& other);
};

std::vector<double> predictive_distribution(const BeliefState& belief);

BeliefSample sample_belief(const BeliefState& belief, Rng& rng);

int sample_response(const BeliefState& belief, Rng& rng);

// counts[k] = w_self * 1{self=k} + sum_j w_j * 1{peer_j=k}.
// When include_self is false the self term is dropped (the protocol's
// "optionally conditions on its own prior output" variant).
UpdateCounts build_update_counts(const AnswerSpace& space, int self_answer,
                                 const std::map<int, int>& peer_answers,
                                 const IdentityWeightProfile& weights,
                                 bool include_self = true);

BeliefState apply_update(const BeliefState& belief, const UpdateCounts& counts);

}  // namespace mad
