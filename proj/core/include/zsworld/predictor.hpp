#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/gaussian.hpp"
#include "zsworld/retrieval.hpp"
#include "zsworld/rng.hpp"

namespace zsworld {

inline constexpr std::size_t kDefaultReplayK = 16;

/// Which retrieval scheme turns a query into a next-state distribution.
struct Method {
  enum class Kind { Rollout, ReplayL2, ReplayKL };

  Kind kind = Kind::Rollout;
  std::size_t k = kDefaultReplayK;  // ReplayL2 only

  static Method rollout() { return {Kind::Rollout, kDefaultReplayK}; }
  static Method replay_l2(std::size_t k = kDefaultReplayK);
  static Method replay_kl() { return {Kind::ReplayKL, kDefaultReplayK}; }

  /// "rollout", "l2" or "kl".
  static Method parse(std::string_view name, std::size_t k = kDefaultReplayK);
  std::string_view name() const noexcept;

  friend bool operator==(const Method&, const Method&) = default;
};

struct PredictOptions {
  /// Use the predicted mean as z_hat instead of sampling.
  bool use_mean = false;
};

struct PredictionStep {
  DiagGaussian dist;
  std::vector<double> z_hat;
  std::optional<ActionId> action_used;
  std::vector<TransitionRef> retrieved;
  /// Seed of the generator z_hat was drawn from:
  /// sample(dist, Rng{sample_seed}) == z_hat unless use_mean was set.
  std::uint64_t sample_seed = 0;
};

struct PredictionTrace {
  std::vector<PredictionStep> steps;
  std::size_t horizon() const noexcept { return steps.size(); }
};

/// One retrieve-and-estimate step. Rollout/ReplayL2 search with `query_z`
/// and fit the retrieved z_next vectors; ReplayKL searches with
/// `query_dist` and takes the retrieved transition's successor
/// distribution. `action` restricts retrieval to that action.
PredictionStep predict_step(const LatentDataset& ds, const Method& method,
                            std::span<const double> query_z,
                            const DiagGaussian& query_dist,
                            std::optional<ActionId> action, Rng& rng,
                            const PredictOptions& opts = {});

/// Iterates predict_step over `actions.size()` steps, feeding back z_hat
/// and the predicted distribution. EmptyRetrievalError carries the step.
PredictionTrace rollout(const LatentDataset& ds, const Method& method,
                        std::span<const double> start_z,
                        const DiagGaussian& start_dist,
                        std::span<const std::optional<ActionId>> actions,
                        Rng& rng, const PredictOptions& opts = {});

}  // namespace zsworld
