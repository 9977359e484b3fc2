#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace mad {

// splitmix64 finalizer (Steele, Lea & Flood; Vigna's fixed-increment variant).
// Used both as a stream-key mixer and to seed the per-stream engine.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

// Splittable seed tree: one root seed expands into independent named streams,
// so per-agent / per-trial randomness does not depend on execution order.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t seed) : state_(mix64(seed ^ 0x6d616421u)) {}

  SeedSequence child(std::uint64_t id) const {
    SeedSequence s(*this);
    s.state_ = mix64(s.state_ ^ mix64(id + 0x517cc1b727220a95ull));
    return s;
  }
  SeedSequence child(std::string_view name) const {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : name) h = (h ^ c) * 0x100000001b3ull;
    return child(h);
  }

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_;
};

// A single random stream. Wraps mt19937_64 seeded from the splittable tree.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  explicit Rng(const SeedSequence& seq) : engine_(seq.value()) {}

  std::mt19937_64& engine() { return engine_; }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }

  // Index draw from an unnormalized nonnegative weight vector.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // Fisher-Yates shuffle, stable across platforms (does not use std::shuffle).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> d(0, i - 1);
      std::swap(v[i - 1], v[d(engine_)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mad
