#include "zsworld/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "zsworld/error.hpp"

namespace zsworld {
namespace {

void check_dim(const LatentDataset& ds, std::size_t query_dim, const char* who) {
  if (query_dim != ds.dim()) {
    throw ContractError(std::string(who) + ": query dimension " + std::to_string(query_dim) +
                        " != dataset dimension " + std::to_string(ds.dim()));
  }
  if (ds.empty()) throw EmptyRetrievalError(std::string(who) + ": dataset is empty");
}

std::string empty_message(const char* who, ActionMask mask) {
  std::string msg = std::string(who) + ": no transition passes the action mask";
  if (mask.action()) msg += " (action " + std::to_string(*mask.action()) + ")";
  return msg;
}

inline double squared_l2(const float* row, const double* q, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = q[i] - static_cast<double>(row[i]);
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

std::vector<TransitionRef> search_rollout(const LatentDataset& ds, std::span<const double> query,
                                          ActionMask mask) {
  check_dim(ds, query.size(), "search_rollout");
  const std::size_t d = ds.dim();
  const float* z = ds.z_rows().data();
  const auto actions = ds.actions();

  std::vector<TransitionRef> out;
  for (std::size_t t = 0; t < ds.num_trajectories(); ++t) {
    const std::size_t begin = ds.trajectory_offset(t);
    const std::size_t end = begin + ds.trajectory_length(t);
    double best = 0.0;
    std::size_t best_g = end;
    for (std::size_t g = begin; g < end; ++g) {
      if (!mask.admits(actions[g])) continue;
      const double d2 = squared_l2(z + g * d, query.data(), d);
      if (best_g == end || d2 < best) {
        best = d2;
        best_g = g;
      }
    }
    if (best_g != end) out.push_back({t, best_g - begin, std::sqrt(best)});
  }
  if (out.empty()) throw EmptyRetrievalError(empty_message("search_rollout", mask));
  return out;
}

std::vector<TransitionRef> search_l2(const LatentDataset& ds, std::span<const double> query,
                                     std::size_t k, ActionMask mask) {
  if (k == 0) throw ContractError("search_l2: k must be at least 1");
  check_dim(ds, query.size(), "search_l2");
  const std::size_t d = ds.dim();
  const float* z = ds.z_rows().data();
  const auto actions = ds.actions();

  // Max-heap on (squared distance, global index); global order equals
  // (trajectory, index) order.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  for (std::size_t g = 0; g < ds.total(); ++g) {
    if (!mask.admits(actions[g])) continue;
    const Entry e{squared_l2(z + g * d, query.data(), d), g};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }
  if (heap.empty()) throw EmptyRetrievalError(empty_message("search_l2", mask));

  std::vector<TransitionRef> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    const auto [d2, g] = heap.top();
    heap.pop();
    const auto [t, i] = ds.locate(g);
    *it = {t, i, std::sqrt(d2)};
  }
  return out;
}

TransitionRef search_kl(const LatentDataset& ds, const DiagGaussian& query, ActionMask mask) {
  check_dim(ds, query.dim(), "search_kl");
  const std::size_t d = ds.dim();
  const float* mu = ds.mu_rows().data();
  const float* sigma = ds.sigma_rows().data();
  const auto actions = ds.actions();
  const auto log_sums = ds.log_sigma_sums();
  const auto qm = query.mu();
  const auto qs = query.sigma();

  // KL(query || stored) = sum ln s_i - sum ln q_i
  //                      + sum (q_i^2 + (qmu_i - smu_i)^2) / (2 s_i^2) - d/2
  double query_log_sum = 0.0;
  for (double s : qs) query_log_sum += std::log(s);
  std::vector<double> query_var(d);
  for (std::size_t i = 0; i < d; ++i) query_var[i] = qs[i] * qs[i];
  const double half_d = 0.5 * static_cast<double>(d);

  bool found = false;
  double best = 0.0;
  std::size_t best_g = 0;
  for (std::size_t g = 0; g < ds.total(); ++g) {
    if (!mask.admits(actions[g])) continue;
    const float* m = mu + g * d;
    const float* s = sigma + g * d;
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = qm[i] - static_cast<double>(m[i]);
      const double sv = static_cast<double>(s[i]);
      quad += (query_var[i] + diff * diff) / (2.0 * sv * sv);
    }
    const double kl = (log_sums[g] - query_log_sum) + (quad - half_d);
    if (!found || kl < best) {
      found = true;
      best = kl;
      best_g = g;
    }
  }
  if (!found) throw EmptyRetrievalError(empty_message("search_kl", mask));
  const auto [t, i] = ds.locate(best_g);
  return {t, i, std::max(best, 0.0)};
}

double scan_time(const LatentDataset& ds, std::span<const double> query_z,
                 const DiagGaussian& query_dist, SearchKind kind, std::size_t k) {
  using clock = std::chrono::steady_clock;
  clock::time_point start, stop;
  switch (kind) {
    case SearchKind::Rollout: {
      start = clock::now();
      auto r = search_rollout(ds, query_z, ActionMask::unconstrained());
      stop = clock::now();
      if (r.empty()) return 0.0;
      break;
    }
    case SearchKind::L2: {
      start = clock::now();
      auto r = search_l2(ds, query_z, k, ActionMask::unconstrained());
      stop = clock::now();
      if (r.empty()) return 0.0;
      break;
    }
    case SearchKind::KL: {
      start = clock::now();
      volatile double score = search_kl(ds, query_dist, ActionMask::unconstrained()).score;
      stop = clock::now();
      (void)score;
      break;
    }
  }
  return std::chrono::duration<double>(stop - start).count();
}

double median_scan_time(const LatentDataset& ds, std::span<const double> query_z,
                        const DiagGaussian& query_dist, SearchKind kind, std::size_t repeats,
                        std::size_t k) {
  if (repeats == 0) throw ContractError("median_scan_time: repeats must be at least 1");
  std::vector<double> times(repeats);
  for (double& t : times) t = scan_time(ds, query_z, query_dist, kind, k);
  std::sort(times.begin(), times.end());
  const std::size_t mid = repeats / 2;
  return repeats % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

}  // namespace zsworld
