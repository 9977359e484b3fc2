#include <cmath>
#include <numeric>

#include <doctest.h>

#include "mad/belief.hpp"
#include "mad/errors.hpp"

using namespace mad;

namespace {

// Independent quadrature oracle: P(X > x) for X ~ Beta(a, b), Simpson's rule
// on the density. Kept free of the sampling path it is used to check.
double beta_tail_above(double a, double b, double x, int steps = 20000) {
  auto log_density = [&](double t) {
    return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - std::lgamma(a) -
           std::lgamma(b) + std::lgamma(a + b);
  };
  double lo = x, hi = 1.0 - 1e-12;
  double h = (hi - lo) / steps;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i) {
    double t0 = lo + i * h, t1 = t0 + h, tm = 0.5 * (t0 + t1);
    sum += h / 6.0 *
           (std::exp(log_density(std::max(t0, 1e-300))) + 4.0 * std::exp(log_density(tm)) +
            std::exp(log_density(t1)));
  }
  return sum;
}

}  // namespace

TEST_CASE("predictive distribution normalizes alpha") {
  CHECK(predictive_distribution(BeliefState({1, 2, 3})) ==
        std::vector<double>{1.0 / 6, 2.0 / 6, 3.0 / 6});
  CHECK(predictive_distribution(BeliefState({5, 5})) == std::vector<double>{0.5, 0.5});
  auto p = predictive_distribution(BeliefState({0.2, 0.3, 0.5}));
  CHECK(p[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("predictive distribution sums to one over random alphas") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> alpha;
    int k = 2 + static_cast<int>(rng.uniform() * 6);
    for (int j = 0; j < k; ++j) alpha.push_back(0.01 + 10.0 * rng.uniform());
    auto p = predictive_distribution(BeliefState(alpha));
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("belief samples live on the simplex and are seed-deterministic") {
  Rng rng(7);
  auto s = sample_belief(BeliefState({1, 1}), rng);
  CHECK(s.theta[0] + s.theta[1] == doctest::Approx(1.0).epsilon(1e-9));

  Rng a(123), b(123);
  auto sa = sample_belief(BeliefState({2, 3, 4}), a);
  auto sb = sample_belief(BeliefState({2, 3, 4}), b);
  CHECK(sa.theta == sb.theta);
}

TEST_CASE("concentrated belief keeps samples near its corner") {
  // Oracle: P(theta0 > 0.9) for Beta(1000, 1), by quadrature.
  double tail = beta_tail_above(1000.0, 1.0, 0.9);
  CHECK(tail > 0.999);

  Rng rng(99);
  BeliefState belief({1000, 1});
  int above = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i)
    if (sample_belief(belief, rng).theta[0] > 0.9) ++above;
  // With tail ~ 1 - 1e-45, any miss would be astronomically unlikely.
  CHECK(above == n);
}

TEST_CASE("sample_response marginal matches the predictive") {
  Rng rng(5);
  SUBCASE("extreme alpha") {
    BeliefState belief({1.0, 0.0001});
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (sample_response(belief, rng) == 0) ++hits;
    CHECK(static_cast<double>(hits) / n > 0.999);
  }
  SUBCASE("uniform over four options") {
    BeliefState belief({1, 1, 1, 1});
    std::vector<int> counts(4, 0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_response(belief, rng))]++;
    for (int k = 0; k < 4; ++k)
      CHECK(static_cast<double>(counts[static_cast<std::size_t>(k)]) / n ==
            doctest::Approx(0.25).epsilon(0.04));
  }
  SUBCASE("3:1 belief") {
    BeliefState belief({3, 1});
    int hits = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
      if (sample_response(belief, rng) == 0) ++hits;
    CHECK(static_cast<double>(hits) / n == doctest::Approx(0.75).epsilon(0.014));
  }
}

TEST_CASE("marginal consistency within 4 sigma for random alphas") {
  Rng rng(2024);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> alpha;
    int k = 2 + trial;
    for (int j = 0; j < k; ++j) alpha.push_back(0.2 + 5.0 * rng.uniform());
    BeliefState belief(alpha);
    auto p = predictive_distribution(belief);
    const int n = 200000;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_response(belief, rng))]++;
    for (int j = 0; j < k; ++j) {
      double freq = static_cast<double>(counts[static_cast<std::size_t>(j)]) / n;
      double se = std::sqrt(p[static_cast<std::size_t>(j)] * (1 - p[static_cast<std::size_t>(j)]) / n);
      CHECK(std::abs(freq - p[static_cast<std::size_t>(j)]) < 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("update counts accumulate identity-weighted one-hots") {
  AnswerSpace k3 = AnswerSpace::letters(3);
  IdentityWeightProfile w1;
  w1.self_weight = 1.0;
  w1.peer_weights[7] = 2.0;
  auto c = build_update_counts(k3, 0, {{7, 2}}, w1);
  CHECK(c.counts == std::vector<double>{1, 0, 2});

  AnswerSpace k4 = AnswerSpace::letters(4);
  IdentityWeightProfile w2 = IdentityWeightProfile::homogeneous(1.0, {1, 2});
  auto c2 = build_update_counts(k4, 1, {{1, 1}, {2, 3}}, w2);
  CHECK(c2.counts == std::vector<double>{0, 2, 0, 1});

  AnswerSpace k2 = AnswerSpace::letters(2);
  IdentityWeightProfile w3;
  w3.self_weight = 0.5;
  w3.peer_weights[1] = 0.25;
  w3.peer_weights[2] = 0.25;
  auto c3 = build_update_counts(k2, 0, {{1, 1}, {2, 1}}, w3);
  CHECK(c3.counts == std::vector<double>{0.5, 0.5});
}

TEST_CASE("missing peer weight names the peer") {
  AnswerSpace k2 = AnswerSpace::letters(2);
  IdentityWeightProfile w;
  w.self_weight = 1.0;
  CHECK_THROWS_WITH_AS(build_update_counts(k2, 0, {{3, 1}}, w),
                       "no identity weight configured for peer 3", ConfigError);
}

TEST_CASE("apply_update adds counts componentwise") {
  auto b = apply_update(BeliefState({1, 1, 1}), {{1, 0, 2}});
  CHECK(b.alpha() == std::vector<double>{2, 1, 3});
  CHECK(apply_update(BeliefState({2, 3}), {{0, 0}}).alpha() == std::vector<double>{2, 3});
  CHECK(apply_update(BeliefState({1, 1}), {{0.5, 0.5}}).alpha() == std::vector<double>{1.5, 1.5});
  CHECK_THROWS_AS(apply_update(BeliefState({1, 1}), {{1, 2, 3}}), UsageError);
}

TEST_CASE("update additivity and mass bookkeeping") {
  // Dyadic weights keep float addition associative here, so equality is exact.
  BeliefState b({1.0, 2.5, 0.25});
  UpdateCounts c1{{0.5, 0.0, 1.0}};
  UpdateCounts c2{{0.25, 2.0, 0.0}};
  UpdateCounts both = c1;
  both += c2;
  CHECK(apply_update(apply_update(b, c1), c2).alpha() == apply_update(b, both).alpha());

  IdentityWeightProfile w;
  w.self_weight = 1.5;
  w.peer_weights[1] = 0.5;
  w.peer_weights[2] = 2.0;
  AnswerSpace k3 = AnswerSpace::letters(3);
  auto c = build_update_counts(k3, 0, {{1, 1}, {2, 2}}, w);
  auto updated = apply_update(b, c);
  CHECK(updated.total_mass() == doctest::Approx(b.total_mass() + w.total()).epsilon(1e-12));
}

TEST_CASE("identical seeds reproduce identical response sequences") {
  BeliefState belief({2, 3, 4});
  Rng a(SeedSequence(77).child("agent").child(3));
  Rng b(SeedSequence(77).child("agent").child(3));
  for (int i = 0; i < 100; ++i) CHECK(sample_response(belief, a) == sample_response(belief, b));

  // Distinct streams from the same root diverge.
  Rng c(SeedSequence(77).child("agent").child(4));
  int diff = 0;
  Rng a2(SeedSequence(77).child("agent").child(3));
  for (int i = 0; i < 100; ++i)
    if (sample_response(belief, a2) != sample_response(belief, c)) ++diff;
  CHECK(diff > 0);
}

TEST_CASE("belief construction enforces the alpha floor") {
  BeliefState b({0.0, 1.0});
  CHECK(b.alpha(0) > 0.0);
  CHECK_THROWS_AS(BeliefState({-1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(BeliefState({1.0}), ConfigError);
}

TEST_CASE("symmetrized profile equalizes all weights at the mean") {
  IdentityWeightProfile w;
  w.self_weight = 2.0;
  w.peer_weights[1] = 1.0;
  w.peer_weights[2] = 3.0;
  auto s = w.symmetrized();
  CHECK(s.self_weight == doctest::Approx(2.0));
  CHECK(s.peer_weights.at(1) == doctest::Approx(2.0));
  CHECK(s.is_symmetric());
  CHECK(s.total() == doctest::Approx(w.total()));
}
