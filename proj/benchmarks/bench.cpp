#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <voiplan/channel.hpp>
#include <voiplan/env.hpp>
#include <voiplan/experiments.hpp>
#include <voiplan/learner.hpp>
#include <voiplan/scenario.hpp>
#include <voiplan/text.hpp>

using namespace voiplan;

namespace {

void BM_Voi(benchmark::State& state) {
    const RadioParams radio{{1.0}};
    const RadioLinear lin = linear(radio);
    FreshnessState fresh{4, 9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(voi(lin, 1.0, 0.7, fresh));
        fresh.aoi = fresh.aoi % 20 + 1;
    }
}
BENCHMARK(BM_Voi);

void BM_EnvStep(benchmark::State& state) {
    const Scenario s = case_study_scenario();
    const State initial = initial_state(s);
    const std::vector<Action> actions = feasible_actions(s, initial);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(s, initial, actions[i % actions.size()]));
        ++i;
    }
}
BENCHMARK(BM_EnvStep);

void BM_FeasibleActions(benchmark::State& state) {
    const Scenario s = case_study_scenario();
    const State initial = initial_state(s);
    std::vector<Action> out;
    for (auto _ : state) {
        feasible_actions(s, initial, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_FeasibleActions);

void BM_GreedyRollout(benchmark::State& state) {
    const Scenario s = case_study_scenario();
    const LearnerConfig config = desk_config(2000, 7);
    const auto trained = train(s, config, env_reward, RewardScale::Spectral);
    const RewardOptions reward{config.penalty, RewardScale::Spectral};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            rollout(s, greedy_policy(trained.first, s), s.horizon, reward));
    }
}
BENCHMARK(BM_GreedyRollout);

void BM_Train(benchmark::State& state) {
    const Scenario s = case_study_scenario();
    const long episodes = state.range(0);
    for (auto _ : state) {
        const LearnerConfig config = desk_config(episodes, 7);
        benchmark::DoNotOptimize(train(s, config, env_reward, RewardScale::Spectral));
    }
    state.SetItemsProcessed(state.iterations() * episodes);
}
BENCHMARK(BM_Train)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
