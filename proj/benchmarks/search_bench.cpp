#include <benchmark/benchmark.h>

#include <map>

#include "zsworld/predictor.hpp"
#include "zsworld/retrieval.hpp"
#include "zsworld/synthworld.hpp"

using namespace zsworld;

namespace {

// 800 x 100 synth transitions, cut to the requested prefix.
const LatentDataset& dataset(std::size_t n) {
  static const LatentDataset full = [] {
    synth::SynthConfig cfg;
    cfg.seed = 42;
    return synth::SynthWorld(cfg).generate(800, 100, synth::Policy::Scripted).data;
  }();
  static std::map<std::size_t, LatentDataset> cut;
  auto it = cut.find(n);
  if (it == cut.end()) it = cut.emplace(n, full.first_transitions(n)).first;
  return it->second;
}

std::vector<double> query(const LatentDataset& ds) {
  const auto v = ds.at(ds.total() / 2);
  return {v.z.begin(), v.z.end()};
}

void BM_Rollout(benchmark::State& state) {
  const auto& ds = dataset(state.range(0));
  const auto q = query(ds);
  for (auto _ : state) benchmark::DoNotOptimize(search_rollout(ds, q, ActionMask::unconstrained()));
  state.SetComplexityN(state.range(0));
}

void BM_L2(benchmark::State& state) {
  const auto& ds = dataset(state.range(0));
  const auto q = query(ds);
  for (auto _ : state) benchmark::DoNotOptimize(search_l2(ds, q, 16, ActionMask::unconstrained()));
  state.SetComplexityN(state.range(0));
}

void BM_KL(benchmark::State& state) {
  const auto& ds = dataset(state.range(0));
  const auto dist = ds.at(ds.total() / 2).dist();
  for (auto _ : state) benchmark::DoNotOptimize(search_kl(ds, dist, ActionMask::unconstrained()));
  state.SetComplexityN(state.range(0));
}

void BM_PredictStep(benchmark::State& state) {
  const auto& ds = dataset(20000);
  const auto q = query(ds);
  const auto dist = ds.at(ds.total() / 2).dist();
  const Method methods[] = {Method::rollout(), Method::replay_l2(), Method::replay_kl()};
  const Method& m = methods[state.range(0)];
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(predict_step(ds, m, q, dist, std::nullopt, rng));
  state.SetLabel(std::string(m.name()));
}

}  // namespace

BENCHMARK(BM_Rollout)->Arg(10000)->Arg(20000)->Arg(40000)->Arg(80000)->Complexity(benchmark::oN);
BENCHMARK(BM_L2)->Arg(10000)->Arg(20000)->Arg(40000)->Arg(80000)->Complexity(benchmark::oN);
BENCHMARK(BM_KL)->Arg(10000)->Arg(20000)->Arg(40000)->Arg(80000)->Complexity(benchmark::oN);
BENCHMARK(BM_PredictStep)->DenseRange(0, 2);

BENCHMARK_MAIN();
