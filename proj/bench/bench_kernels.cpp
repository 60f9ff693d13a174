// Serial reference kernels against their OpenMP counterparts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rlvr/grpo.hpp"
#include "rlvr/policy.hpp"
#include "rlvr/rewards.hpp"
#include "rlvr/spatial.hpp"
#include "oracles/scenes.hpp"

using namespace rlvr;

namespace {

std::vector<ScoringItem> scoring_items(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 600);
  std::vector<ScoringItem> items(n);
  for (std::size_t i = 0; i < n; ++i) {
    items[i].text = "<think>estimate</think><answer>\\boxed{" + std::to_string(v(rng)) + "}</answer>";
    items[i].gt = {AnswerKind::Numeric, "300", std::nullopt, std::nullopt};
    items[i].family = i % 2 ? TaskFamily::Spatial : TaskFamily::General;
  }
  return items;
}

struct BatchSetup {
  ToyPolicy policy;
  ToyPolicy ref;
  std::vector<RolloutGroup> batch;
};

BatchSetup batch_setup(int prompts) {
  std::mt19937_64 rng(2);
  const NumericGrid grid;
  auto tasks = make_numeric_tasks(prompts, grid, 0, 39, rng, "num");
  ToyPolicy ref = make_policy_for(tasks, Vocabulary::standard(grid));
  ToyPolicy policy = ref;
  std::normal_distribution<double> n(0, 0.3);
  for (double& p : policy.mutable_params()) p += n(rng);
  std::vector<RolloutGroup> batch;
  for (const auto& t : tasks) {
    auto g = sample_group(ref, t, 16, 1.0, rng);
    assign_rewards(g, t.gt, TaskFamily::Spatial, {});
    batch.push_back(std::move(g));
  }
  return {policy, ref, std::move(batch)};
}

void BM_ScoreSerial(benchmark::State& state) {
  auto items = scoring_items(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(score_batch_serial(items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreParallel(benchmark::State& state) {
  auto items = scoring_items(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(score_batch_parallel(items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchObjectiveSerial(benchmark::State& state) {
  auto s = batch_setup(static_cast<int>(state.range(0)));
  TrainConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(batch_objective_serial(s.policy, s.ref, s.batch, 0.005, config));
}

void BM_BatchObjectiveParallel(benchmark::State& state) {
  auto s = batch_setup(static_cast<int>(state.range(0)));
  TrainConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(batch_objective_parallel(s.policy, s.ref, s.batch, 0.005, config));
}

std::vector<SceneAnnotation> scenes(int n) {
  std::mt19937_64 rng(3);
  std::vector<SceneAnnotation> out;
  for (int k = 0; k < n; ++k) out.push_back(oracle::random_scene(rng, "s" + std::to_string(k)));
  return out;
}

void run_synth(benchmark::State& state, bool parallel) {
  auto s = scenes(static_cast<int>(state.range(0)));
  std::vector<SynthJob> jobs;
  for (const auto& scene : s) jobs.push_back({&scene, nullptr});
  const std::vector<SpatialCategory> cats(std::begin(kImageCategories), std::end(kImageCategories));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? synthesize_parallel(jobs, cats) : synthesize_serial(jobs, cats));
  }
}

void BM_SynthSerial(benchmark::State& state) { run_synth(state, false); }
void BM_SynthParallel(benchmark::State& state) { run_synth(state, true); }

}  // namespace

BENCHMARK(BM_ScoreSerial)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_ScoreParallel)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_BatchObjectiveSerial)->Arg(8)->Arg(64);
BENCHMARK(BM_BatchObjectiveParallel)->Arg(8)->Arg(64);
BENCHMARK(BM_SynthSerial)->Arg(64)->Arg(512);
BENCHMARK(BM_SynthParallel)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
