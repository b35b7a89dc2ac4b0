#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/metrics.hpp"
#include "zsworld/predictor.hpp"

namespace zsworld {

inline constexpr std::size_t kDefaultHorizon = 20;
inline constexpr std::size_t kDefaultStarts = 20;

struct EvalConfig {
  std::size_t n_starts = kDefaultStarts;
  std::size_t horizon = kDefaultHorizon;
  bool conditioned = false;
  std::uint64_t seed = 0;
  PredictOptions predict;
};

struct StartPoint {
  std::size_t trajectory = 0;
  std::size_t index = 0;
  friend bool operator==(const StartPoint&, const StartPoint&) = default;
};

/// Mean and (population) variance across starts at one step.
struct StepStats {
  double mean = 0.0;
  double var = 0.0;
};

struct MetricSeries {
  std::vector<StartPoint> starts;
  std::vector<StepStats> kl;
  /// Filled only when an ImageProbe is supplied.
  std::optional<std::vector<StepStats>> l1;
  std::optional<std::vector<StepStats>> ssim;

  /// Average of the per-step KL means.
  double mean_kl() const;
};

/// Any one-step predictor: the three retrieval methods, or a baseline.
using StepPredictor = std::function<PredictionStep(
    std::span<const double> query_z, const DiagGaussian& query_dist,
    std::optional<ActionId> action, Rng& rng)>;

StepPredictor make_predictor(const LatentDataset& ds, const Method& method,
                             const PredictOptions& opts = {});

/// Optional hooks. `truth(t, i)` is the true distribution of the state after
/// test transition (t, i); the default is the stored dist_next.
struct EvalHooks {
  std::function<DiagGaussian(std::size_t, std::size_t)> truth;
  /// Image metrics: decode a predicted latent, and render the true image of
  /// the state after test transition (t, i).
  std::function<ImageArray(std::span<const double>)> decode;
  std::function<ImageArray(std::size_t, std::size_t)> true_image;
};

/// Uniformly chosen start positions (t, i) with i + horizon <= len(t);
/// distinct when enough candidates exist. DataError when none exist.
std::vector<StartPoint> sample_starts(const LatentDataset& test,
                                      std::size_t n_starts, std::size_t horizon,
                                      Rng& rng);

/// Teacher-forced protocol: every step queries with the true test latent
/// and distribution, and is scored by KL(predicted || true next).
MetricSeries evaluate_one_step(const StepPredictor& predictor,
                               const LatentDataset& test, const EvalConfig& cfg,
                               const EvalHooks& hooks = {});
MetricSeries evaluate_one_step(const LatentDataset& ds, const Method& method,
                               const LatentDataset& test, const EvalConfig& cfg,
                               const EvalHooks& hooks = {});

/// Free-running protocol: each start is rolled out once from its true
/// latent; step i is scored against the true distribution at start + i + 1.
/// When conditioned, the test trajectory's own actions drive the rollout.
MetricSeries evaluate_long_horizon(const StepPredictor& predictor,
                                   const LatentDataset& test,
                                   const EvalConfig& cfg,
                                   const EvalHooks& hooks = {});
MetricSeries evaluate_long_horizon(const LatentDataset& ds, const Method& method,
                                   const LatentDataset& test,
                                   const EvalConfig& cfg,
                                   const EvalHooks& hooks = {});

}  // namespace zsworld
