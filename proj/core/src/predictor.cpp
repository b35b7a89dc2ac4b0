#include "zsworld/predictor.hpp"

#include <string>

#include "zsworld/error.hpp"

namespace zsworld {

Method Method::replay_l2(std::size_t k) {
  if (k == 0) throw ContractError("Replay-L2 needs k >= 1");
  return {Kind::ReplayL2, k};
}

Method Method::parse(std::string_view name, std::size_t k) {
  if (name == "rollout") return rollout();
  if (name == "l2") return replay_l2(k);
  if (name == "kl") return replay_kl();
  throw ContractError("unknown method \"" + std::string(name) + "\" (expected rollout, l2 or kl)");
}

std::string_view Method::name() const noexcept {
  switch (kind) {
    case Kind::Rollout: return "rollout";
    case Kind::ReplayL2: return "l2";
    case Kind::ReplayKL: return "kl";
  }
  return "?";
}

PredictionStep predict_step(const LatentDataset& ds, const Method& method,
                            std::span<const double> query_z, const DiagGaussian& query_dist,
                            std::optional<ActionId> action, Rng& rng,
                            const PredictOptions& opts) {
  if (query_z.size() != ds.dim() || query_dist.dim() != ds.dim()) {
    throw ContractError("predict_step: query dimension does not match dataset");
  }
  if (action && *action >= ds.num_actions()) {
    throw ContractError("predict_step: action " + std::to_string(*action) + " >= A=" +
                        std::to_string(ds.num_actions()));
  }
  const ActionMask mask = ActionMask::from(action);

  PredictionStep step;
  step.action_used = action;
  switch (method.kind) {
    case Method::Kind::Rollout:
    case Method::Kind::ReplayL2: {
      step.retrieved = method.kind == Method::Kind::Rollout
                           ? search_rollout(ds, query_z, mask)
                           : search_l2(ds, query_z, method.k, mask);
      std::vector<double> rows;
      rows.reserve(step.retrieved.size() * ds.dim());
      for (const TransitionRef& r : step.retrieved) {
        const auto next = ds.at(r.trajectory, r.index).z_next;
        rows.insert(rows.end(), next.begin(), next.end());
      }
      step.dist = fit_gaussian(rows, ds.dim());
      break;
    }
    case Method::Kind::ReplayKL: {
      const TransitionRef hit = search_kl(ds, query_dist, mask);
      step.retrieved = {hit};
      step.dist = ds.at(hit.trajectory, hit.index).dist_next();
      break;
    }
  }

  step.sample_seed = rng();
  if (opts.use_mean) {
    step.z_hat.assign(step.dist.mu().begin(), step.dist.mu().end());
  } else {
    Rng sampler(step.sample_seed);
    step.z_hat = sample(step.dist, sampler);
  }
  return step;
}

PredictionTrace rollout(const LatentDataset& ds, const Method& method,
                        std::span<const double> start_z, const DiagGaussian& start_dist,
                        std::span<const std::optional<ActionId>> actions, Rng& rng,
                        const PredictOptions& opts) {
  if (actions.empty()) throw ContractError("rollout: horizon must be at least 1");
  PredictionTrace trace;
  trace.steps.reserve(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const bool first = i == 0;
    const std::span<const double> z = first ? start_z : std::span<const double>(trace.steps.back().z_hat);
    const DiagGaussian& dist = first ? start_dist : trace.steps.back().dist;
    try {
      trace.steps.push_back(predict_step(ds, method, z, dist, actions[i], rng, opts));
    } catch (const EmptyRetrievalError& e) {
      throw EmptyRetrievalError(e.what(), i);
    }
  }
  return trace;
}

}  // namespace zsworld
