#include <benchmark/benchmark.h>

#include "mad/metrics.hpp"
#include "mad/prompt.hpp"
#include "mad/sim.hpp"

using namespace mad;

namespace {

void BM_SampleResponse(benchmark::State& state) {
  BeliefState belief({2.0, 1.0, 1.0, 1.0});
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_response(belief, rng));
}
BENCHMARK(BM_SampleResponse);

void BM_BeliefUpdate(benchmark::State& state) {
  AnswerSpace space = AnswerSpace::letters(4);
  BeliefState belief({1.0, 1.0, 1.0, 1.0});
  IdentityWeightProfile w = IdentityWeightProfile::homogeneous(1.0, {1, 2, 3});
  std::map<int, int> peers = {{1, 1}, {2, 2}, {3, 1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_update(belief, build_update_counts(space, 0, peers, w)));
  }
}
BENCHMARK(BM_BeliefUpdate);

void BM_AnalyticMultiPeer(benchmark::State& state) {
  BeliefState belief({1.0, 1.0, 1.0, 1.0});
  IdentityWeightProfile w = IdentityWeightProfile::homogeneous(1.0, {1, 2, 3, 4, 5});
  std::map<int, int> peers = {{1, 1}, {2, 2}, {3, 1}, {4, 0}, {5, 3}};
  for (auto _ : state) benchmark::DoNotOptimize(analytic_multi_peer(belief, 0, peers, w));
}
BENCHMARK(BM_AnalyticMultiPeer);

void BM_Simulation(benchmark::State& state) {
  SimConfig config{AnswerSpace::letters(4),
                   Topology::fully_connected(static_cast<int>(state.range(0))),
                   3,
                   {BeliefState::uniform(4)},
                   {IdentityWeightProfile::homogeneous(1.0, {})},
                   false,
                   64,
                   7};
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(config));
  state.SetItemsProcessed(state.iterations() * 64 * 4 * state.range(0));
}
BENCHMARK(BM_Simulation)->Arg(2)->Arg(4)->Arg(8);

void BM_BuildAnonymizedPrompt(benchmark::State& state) {
  PromptMode mode;
  mode.variant = PromptVariant::anonymized;
  Rng rng(3);
  std::vector<std::string> peers(5, "I believe the answer is (B). {final answer: (B)}");
  std::string self = "I believe the answer is (A). {final answer: (A)}";
  for (auto _ : state)
    benchmark::DoNotOptimize(build_prompt("What is the answer?", mode, self, peers, rng));
}
BENCHMARK(BM_BuildAnonymizedPrompt);

void BM_ParseAnswer(benchmark::State& state) {
  AnswerSpace space = AnswerSpace::letters(4);
  std::string completion =
      "Let me think. Option A seems wrong because of X; B is plausible. {final answer: (B)}";
  for (auto _ : state) benchmark::DoNotOptimize(parse_answer(completion, space));
}
BENCHMARK(BM_ParseAnswer);

void BM_Estimators(benchmark::State& state) {
  // 512 instances, 4 agents, 3 rounds of synthetic answers.
  Rng rng(11);
  AnswerGrid grid;
  for (int i = 0; i < 512; ++i) {
    std::vector<std::vector<int>> instance;
    for (int t = 0; t < 3; ++t) {
      std::vector<int> round;
      for (int a = 0; a < 4; ++a) round.push_back(static_cast<int>(rng.uniform() * 4));
      instance.push_back(std::move(round));
    }
    grid.push_back(std::move(instance));
  }
  Topology topo = Topology::fully_connected(4);
  for (auto _ : state) benchmark::DoNotOptimize(multi_peer_estimators(grid, 2, topo));
}
BENCHMARK(BM_Estimators);

}  // namespace

BENCHMARK_MAIN();
