#include "mad/belief.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mad/errors.hpp"

namespace mad {

namespace {
constexpr double kMinAlpha = 1e-12;  // Dirichlet is undefined at 0
}

AnswerSpace::AnswerSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw ConfigError("answer space needs at least 2 options");
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    auto [it, inserted] = index_.emplace(labels_[static_cast<std::size_t>(i)], i);
    if (!inserted) throw ConfigError("duplicate answer label: " + labels_[static_cast<std::size_t>(i)]);
  }
}

AnswerSpace AnswerSpace::letters(int k) {
  if (k < 2 || k > 26) throw ConfigError("letter answer space supports K in [2, 26]");
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
  return AnswerSpace(std::move(labels));
}

const std::string& AnswerSpace::label(int index) const {
  if (index < 0 || index >= size()) throw UsageError("answer index out of range");
  return labels_[static_cast<std::size_t>(index)];
}

int AnswerSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

BeliefState::BeliefState(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) throw ConfigError("belief needs at least 2 components");
  for (double& a : alpha_) {
    if (!std::isfinite(a) || a < 0.0) throw ConfigError("belief components must be finite and nonnegative");
    if (a < kMinAlpha) a = kMinAlpha;
  }
}

BeliefState BeliefState::uniform(int k, double mass) {
  return BeliefState(std::vector<double>(static_cast<std::size_t>(k), mass));
}

double BeliefState::total_mass() const {
  return std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

IdentityWeightProfile IdentityWeightProfile::homogeneous(double w, const std::vector<int>& peers) {
  IdentityWeightProfile p;
  p.self_weight = w;
  for (int id : peers) p.peer_weights[id] = w;
  return p;
}

IdentityWeightProfile IdentityWeightProfile::symmetrized() const {
  double mean = total() / static_cast<double>(1 + peer_weights.size());
  IdentityWeightProfile p;
  p.self_weight = mean;
  for (const auto& [id, _] : peer_weights) p.peer_weights[id] = mean;
  return p;
}

double IdentityWeightProfile::total() const {
  double t = self_weight;
  for (const auto& [_, w] : peer_weights) t += w;
  return t;
}

bool IdentityWeightProfile::is_symmetric(double tol) const {
  for (const auto& [_, w] : peer_weights)
    if (std::abs(w - self_weight) > tol) return false;
  return true;
}

UpdateCounts& UpdateCounts::operator+=(const UpdateCounts& other) {
  if (counts.size() != other.counts.size()) throw UsageError("count vector dimension mismatch");
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
  return *this;
}

std::vector<double> predictive_distribution(const BeliefState& belief) {
  std::vector<double> p = belief.alpha();
  double z = belief.total_mass();
  for (double& v : p) v /= z;
  return p;
}

BeliefSample sample_belief(const BeliefState& belief, Rng& rng) {
  // K independent Gamma(alpha_k, 1) draws normalized by their sum.
  std::vector<double> theta(belief.alpha().size());
  double total = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    theta[k] = rng.gamma(belief.alpha()[k]);
    total += theta[k];
  }
  if (total <= 0.0) {
    // All gamma draws underflowed (possible for tiny alphas); fall back to
    // the largest-alpha corner of the simplex.
    std::size_t best = 0;
    for (std::size_t k = 1; k < theta.size(); ++k)
      if (belief.alpha()[k] > belief.alpha()[best]) best = k;
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = (k == best) ? 1.0 : 0.0;
    return {std::move(theta)};
  }
  for (double& v : theta) v /= total;
  return {std::move(theta)};
}

int sample_response(const BeliefState& belief, Rng& rng) {
  BeliefSample s = sample_belief(belief, rng);
  return rng.categorical(s.theta);
}

UpdateCounts build_update_counts(const AnswerSpace& space, int self_answer,
                                 const std::map<int, int>& peer_answers,
                                 const IdentityWeightProfile& weights, bool include_self) {
  UpdateCounts c{std::vector<double>(static_cast<std::size_t>(space.size()), 0.0)};
  if (include_self) {
    if (self_answer < 0 || self_answer >= space.size()) throw UsageError("self answer index out of range");
    c.counts[static_cast<std::size_t>(self_answer)] += weights.self_weight;
  }
  for (const auto& [peer, answer] : peer_answers) {
    if (answer < 0 || answer >= space.size()) throw UsageError("peer answer index out of range");
    auto it = weights.peer_weights.find(peer);
    if (it == weights.peer_weights.end())
      throw ConfigError("no identity weight configured for peer " + std::to_string(peer));
    c.counts[static_cast<std::size_t>(answer)] += it->second;
  }
  return c;
}

BeliefState apply_update(const BeliefState& belief, const UpdateCounts& counts) {
  if (counts.counts.size() != belief.alpha().size())
    throw UsageError("update counts dimension mismatch");
  std::vector<double> a = belief.alpha();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += counts.counts[k];
  return BeliefState(std::move(a));
}

}  // namespace mad
