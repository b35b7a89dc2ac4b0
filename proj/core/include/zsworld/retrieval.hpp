#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/gaussian.hpp"

namespace zsworld {

/// Identifies a retrieved transition. `score` is an L2 distance or a KL
/// divergence (nats) depending on the search.
struct TransitionRef {
  std::size_t trajectory = 0;
  std::size_t index = 0;
  double score = 0.0;

  friend bool operator==(const TransitionRef&, const TransitionRef&) = default;
};

/// Restricts retrieval to transitions taken with one action (Z_a), or leaves
/// it unconstrained.
class ActionMask {
 public:
  static ActionMask unconstrained() { return ActionMask{}; }
  static ActionMask equals(ActionId a) { return ActionMask{a}; }
  static ActionMask from(std::optional<ActionId> a) { return ActionMask{a}; }

  bool admits(ActionId a) const noexcept { return !action_ || *action_ == a; }
  std::optional<ActionId> action() const noexcept { return action_; }

 private:
  ActionMask() = default;
  explicit ActionMask(std::optional<ActionId> a) : action_(a) {}
  std::optional<ActionId> action_;
};

/// Rollout buffer search: the nearest (L2) mask-passing transition of each
/// trajectory, ordered by trajectory id, ties to the lowest index.
std::vector<TransitionRef> search_rollout(const LatentDataset& ds,
                                          std::span<const double> query,
                                          ActionMask mask);

/// Replay buffer search: the k nearest mask-passing transitions by L2,
/// ascending by (distance, trajectory, index). Returns fewer than k when the
/// mask leaves fewer candidates.
std::vector<TransitionRef> search_l2(const LatentDataset& ds,
                                     std::span<const double> query,
                                     std::size_t k, ActionMask mask);

/// Replay buffer search by distribution: the mask-passing transition
/// minimising KL(query || stored dist), ties to (trajectory, index).
TransitionRef search_kl(const LatentDataset& ds, const DiagGaussian& query,
                        ActionMask mask);

enum class SearchKind { Rollout, L2, KL };

/// Wall-clock seconds of a single search call.
double scan_time(const LatentDataset& ds, std::span<const double> query_z,
                 const DiagGaussian& query_dist, SearchKind kind,
                 std::size_t k = 16);

/// Median of `repeats` scan_time measurements.
double median_scan_time(const LatentDataset& ds, std::span<const double> query_z,
                        const DiagGaussian& query_dist, SearchKind kind,
                        std::size_t repeats, std::size_t k = 16);

}  // namespace zsworld
