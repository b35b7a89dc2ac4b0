#include "zsworld/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "zsworld/error.hpp"

namespace zsworld {
namespace {

constexpr std::uint64_t kStartStream = 0x5741525453ULL;

StepStats stats(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, var / n};
}

std::vector<StepStats> column_stats(const std::vector<std::vector<double>>& per_start,
                                    std::size_t horizon) {
  std::vector<StepStats> out(horizon);
  std::vector<double> col(per_start.size());
  for (std::size_t h = 0; h < horizon; ++h) {
    for (std::size_t s = 0; s < per_start.size(); ++s) col[s] = per_start[s][h];
    out[h] = stats(col);
  }
  return out;
}

void check_config(const EvalConfig& cfg) {
  if (cfg.horizon == 0) throw ContractError("evaluation: horizon must be at least 1");
  if (cfg.n_starts == 0) throw ContractError("evaluation: need at least one start");
}

// Shared driver. `teacher_forced` selects the one-step protocol.
MetricSeries evaluate(const StepPredictor& predictor, const LatentDataset& test,
                      const EvalConfig& cfg, const EvalHooks& hooks, bool teacher_forced) {
  check_config(cfg);
  Rng start_rng(derive_seed(cfg.seed, {kStartStream}));
  MetricSeries series;
  series.starts = sample_starts(test, cfg.n_starts, cfg.horizon, start_rng);

  const bool images = hooks.decode && hooks.true_image;
  const std::size_t n = series.starts.size();
  std::vector<std::vector<double>> kl(n, std::vector<double>(cfg.horizon));
  std::vector<std::vector<double>> l1, ss;
  if (images) {
    l1.assign(n, std::vector<double>(cfg.horizon));
    ss.assign(n, std::vector<double>(cfg.horizon));
  }

  for (std::size_t s = 0; s < n; ++s) {
    const auto [t, i0] = series.starts[s];
    Rng rng(derive_seed(cfg.seed, {s}));
    const TransitionView first = test.at(t, i0);
    std::vector<double> z(first.z.begin(), first.z.end());
    DiagGaussian dist = first.dist();

    for (std::size_t h = 0; h < cfg.horizon; ++h) {
      const TransitionView cur = test.at(t, i0 + h);
      if (teacher_forced && h > 0) {
        z.assign(cur.z.begin(), cur.z.end());
        dist = cur.dist();
      }
      std::optional<ActionId> action;
      if (cfg.conditioned) action = cur.action;

      PredictionStep step;
      try {
        step = predictor(z, dist, action, rng);
      } catch (const EmptyRetrievalError& e) {
        throw EmptyRetrievalError(e.what(), h);
      }
      const DiagGaussian truth = hooks.truth ? hooks.truth(t, i0 + h) : cur.dist_next();
      kl[s][h] = kl_divergence(step.dist, truth);
      if (images) {
        const ImageArray predicted = hooks.decode(step.z_hat);
        const ImageArray actual = hooks.true_image(t, i0 + h);
        l1[s][h] = l1_distance(predicted, actual);
        ss[s][h] = ssim(predicted, actual);
      }
      z = std::move(step.z_hat);
      dist = std::move(step.dist);
    }
  }

  series.kl = column_stats(kl, cfg.horizon);
  if (images) {
    series.l1 = column_stats(l1, cfg.horizon);
    series.ssim = column_stats(ss, cfg.horizon);
  }
  return series;
}

}  // namespace

double MetricSeries::mean_kl() const {
  if (kl.empty()) return 0.0;
  double sum = 0.0;
  for (const StepStats& s : kl) sum += s.mean;
  return sum / static_cast<double>(kl.size());
}

StepPredictor make_predictor(const LatentDataset& ds, const Method& method,
                             const PredictOptions& opts) {
  return [&ds, method, opts](std::span<const double> z, const DiagGaussian& dist,
                             std::optional<ActionId> action, Rng& rng) {
    return predict_step(ds, method, z, dist, action, rng, opts);
  };
}

std::vector<StartPoint> sample_starts(const LatentDataset& test, std::size_t n_starts,
                                      std::size_t horizon, Rng& rng) {
  std::vector<StartPoint> candidates;
  for (std::size_t t = 0; t < test.num_trajectories(); ++t) {
    const std::size_t len = test.trajectory_length(t);
    for (std::size_t i = 0; i + horizon <= len; ++i) candidates.push_back({t, i});
  }
  if (candidates.empty()) {
    throw DataError("no test trajectory has " + std::to_string(horizon) +
                    " transitions left from any start");
  }
  std::vector<StartPoint> out;
  out.reserve(n_starts);
  if (candidates.size() >= n_starts) {
    // Partial Fisher-Yates: distinct starts.
    for (std::size_t s = 0; s < n_starts; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, candidates.size() - 1);
      std::swap(candidates[s], candidates[pick(rng)]);
      out.push_back(candidates[s]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    for (std::size_t s = 0; s < n_starts; ++s) out.push_back(candidates[pick(rng)]);
  }
  return out;
}

MetricSeries evaluate_one_step(const StepPredictor& predictor, const LatentDataset& test,
                               const EvalConfig& cfg, const EvalHooks& hooks) {
  return evaluate(predictor, test, cfg, hooks, true);
}

MetricSeries evaluate_one_step(const LatentDataset& ds, const Method& method,
                               const LatentDataset& test, const EvalConfig& cfg,
                               const EvalHooks& hooks) {
  if (ds.dim() != test.dim() || ds.num_actions() != test.num_actions()) {
    throw DataError("test set d/A does not match the retrieval dataset");
  }
  return evaluate(make_predictor(ds, method, cfg.predict), test, cfg, hooks, true);
}

MetricSeries evaluate_long_horizon(const StepPredictor& predictor, const LatentDataset& test,
                                   const EvalConfig& cfg, const EvalHooks& hooks) {
  return evaluate(predictor, test, cfg, hooks, false);
}

MetricSeries evaluate_long_horizon(const LatentDataset& ds, const Method& method,
                                   const LatentDataset& test, const EvalConfig& cfg,
                                   const EvalHooks& hooks) {
  if (ds.dim() != test.dim() || ds.num_actions() != test.num_actions()) {
    throw DataError("test set d/A does not match the retrieval dataset");
  }
  return evaluate(make_predictor(ds, method, cfg.predict), test, cfg, hooks, false);
}

}  // namespace zsworld
