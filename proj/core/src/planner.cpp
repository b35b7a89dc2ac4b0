#include "zsworld/planner.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "zsworld/error.hpp"

namespace zsworld {
namespace {

constexpr double kZ95 = 1.96;

enum Stream : std::uint64_t { kEnvNoise = 0, kAgent = 1, kReset = 2, kRandomPolicy = 3 };

std::vector<TransitionRef> retrieve_unconstrained(const LatentDataset& ds, const Method& method,
                                                  std::span<const double> z,
                                                  const DiagGaussian& dist) {
  const ActionMask any = ActionMask::unconstrained();
  switch (method.kind) {
    case Method::Kind::Rollout: return search_rollout(ds, z, any);
    case Method::Kind::ReplayL2: return search_l2(ds, z, method.k, any);
    case Method::Kind::ReplayKL: return {search_kl(ds, dist, any)};
  }
  return {};
}

}  // namespace

std::vector<double> action_distribution(std::span<const TransitionRef> retrieved,
                                        const LatentDataset& ds) {
  if (retrieved.empty()) throw EmptyRetrievalError("action_distribution: empty batch");
  std::vector<double> p(ds.num_actions(), 0.0);
  for (const TransitionRef& r : retrieved) p[ds.at(r.trajectory, r.index).action] += 1.0;
  for (double& v : p) v /= static_cast<double>(retrieved.size());
  return p;
}

ActionId mode_action(std::span<const double> distribution) {
  if (distribution.empty()) throw ContractError("mode_action: empty distribution");
  ActionId best = 0;
  for (ActionId a = 1; a < distribution.size(); ++a) {
    if (distribution[a] > distribution[best]) best = a;
  }
  return best;
}

std::vector<ActionId> plan(const LatentDataset& ds, const Method& method,
                           const DiagGaussian& observed_dist, std::span<const double> observed_z,
                           const PlanConfig& cfg, Rng& rng) {
  if (cfg.horizon == 0) throw ContractError("plan: horizon must be at least 1");
  std::vector<double> z(observed_z.begin(), observed_z.end());
  DiagGaussian dist = observed_dist;
  std::vector<ActionId> actions;
  actions.reserve(cfg.horizon);
  for (std::size_t h = 0; h < cfg.horizon; ++h) {
    try {
      const auto retrieved = retrieve_unconstrained(ds, method, z, dist);
      const ActionId a = mode_action(action_distribution(retrieved, ds));
      actions.push_back(a);
      PredictionStep step = predict_step(ds, method, z, dist, a, rng);
      z = std::move(step.z_hat);
      dist = std::move(step.dist);
    } catch (const EmptyRetrievalError& e) {
      throw EmptyRetrievalError(e.what(), h);
    }
  }
  return actions;
}

ReturnSummary summarize_returns(std::span<const double> returns) {
  if (returns.empty()) throw ContractError("summarize_returns: no returns");
  const double n = static_cast<double>(returns.size());
  ReturnSummary s;
  s.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  if (returns.size() > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - s.mean) * (r - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  const double half = kZ95 * s.std / std::sqrt(n);
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

PlanningReport run_planning_eval(const synth::SynthWorld& env, const LatentDataset& ds,
                                 const PlanConfig& cfg) {
  const auto& env_cfg = env.config();
  if (ds.dim() != env_cfg.d || ds.num_actions() != env_cfg.num_actions) {
    throw DataError("planning: dataset d/A (" + std::to_string(ds.dim()) + "/" +
                    std::to_string(ds.num_actions()) + ") does not match the environment (" +
                    std::to_string(env_cfg.d) + "/" + std::to_string(env_cfg.num_actions) + ")");
  }
  if (cfg.episodes == 0 || cfg.horizon == 0) {
    throw ContractError("planning: episodes and horizon must be at least 1");
  }

  PlanningReport report;
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    Rng reset(derive_seed(cfg.seed, {e, kReset}));
    const synth::WorldState start = env.initial_state(reset);

    {
      Rng noise(derive_seed(cfg.seed, {e, kEnvNoise}));
      Rng agent(derive_seed(cfg.seed, {e, kAgent}));
      synth::WorldState s = start;
      double ret = 0.0;
      std::size_t t = 0;
      while (t < cfg.episode_length) {
        const DiagGaussian observed = env.encode(s);
        const std::vector<double> z = sample(observed, agent);
        for (ActionId a : plan(ds, cfg.method, observed, z, cfg, agent)) {
          if (t == cfg.episode_length) break;
          const synth::WorldState next = env.step(s, a, noise);
          ret += env.track_progress(s, next);
          s = next;
          ++t;
        }
      }
      report.returns.push_back(ret);
    }
    {
      Rng noise(derive_seed(cfg.seed, {e, kEnvNoise}));
      Rng policy(derive_seed(cfg.seed, {e, kRandomPolicy}));
      std::uniform_int_distribution<ActionId> any(0, static_cast<ActionId>(ds.num_actions() - 1));
      synth::WorldState s = start;
      double ret = 0.0;
      for (std::size_t t = 0; t < cfg.episode_length; ++t) {
        const synth::WorldState next = env.step(s, any(policy), noise);
        ret += env.track_progress(s, next);
        s = next;
      }
      report.random_returns.push_back(ret);
    }
  }
  report.summary = summarize_returns(report.returns);
  report.random_summary = summarize_returns(report.random_returns);
  return report;
}

}  // namespace zsworld
