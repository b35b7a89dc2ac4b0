#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/predictor.hpp"
#include "zsworld/retrieval.hpp"
#include "zsworld/synthworld.hpp"

namespace zsworld {

struct PlanConfig {
  std::size_t horizon = 20;
  std::size_t episodes = 50;
  std::size_t episode_length = 200;
  Method method = Method::rollout();
  std::uint64_t seed = 0;
};

/// Empirical action frequencies of a retrieved batch, length A.
std::vector<double> action_distribution(std::span<const TransitionRef> retrieved,
                                        const LatentDataset& ds);

/// Most probable action; ties go to the lowest id.
ActionId mode_action(std::span<const double> distribution);

/// Open-loop plan of cfg.horizon actions from one observation. Each step
/// retrieves unconstrained for the current predicted state, commits the
/// mode action, then advances with a prediction conditioned on it. Sees no
/// environment.
std::vector<ActionId> plan(const LatentDataset& ds, const Method& method,
                           const DiagGaussian& observed_dist,
                           std::span<const double> observed_z,
                           const PlanConfig& cfg, Rng& rng);

struct ReturnSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// mean +- 1.96 std / sqrt(n).
ReturnSummary summarize_returns(std::span<const double> returns);

struct PlanningReport {
  std::vector<double> returns;
  std::vector<double> random_returns;
  ReturnSummary summary;
  ReturnSummary random_summary;
};

/// Plan / execute blind / re-observe until the episode ends, rewarding
/// track progress. A uniform-random policy runs on the same environment
/// seeds for comparison.
PlanningReport run_planning_eval(const synth::SynthWorld& env,
                                 const LatentDataset& ds, const PlanConfig& cfg);

}  // namespace zsworld
