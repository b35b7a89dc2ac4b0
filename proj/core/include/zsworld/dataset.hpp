#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zsworld/gaussian.hpp"

namespace zsworld {

using ActionId = std::uint32_t;

/// One stored transition (z_t, a_t, z_{t+1}) with the encoder Gaussians of
/// both endpoints. Vectors are kept at on-disk (f32) precision.
struct Transition {
  std::vector<float> z;
  ActionId action = 0;
  std::vector<float> z_next;
  std::vector<float> mu;
  std::vector<float> sigma;
  std::vector<float> mu_next;
  std::vector<float> sigma_next;

  DiagGaussian dist() const;
  DiagGaussian dist_next() const;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
  std::uint32_t id = 0;
  std::vector<Transition> transitions;
};

/// Read-only view of a transition stored inside a LatentDataset.
struct TransitionView {
  std::span<const float> z;
  ActionId action;
  std::span<const float> z_next;
  std::span<const float> mu;
  std::span<const float> sigma;
  std::span<const float> mu_next;
  std::span<const float> sigma_next;

  DiagGaussian dist() const;
  DiagGaussian dist_next() const;
  Transition to_transition() const;
};

/// Trajectories of transitions laid out column-wise in contiguous memory.
///
/// Trajectory ids are their positions. Every append is validated: dimension,
/// action < A, finite values, sigma > 0, and the successor chain
/// (transitions[i].z_next/dist_next equal transitions[i+1].z/dist bitwise).
/// Once built, a dataset is only read; const access is safe from any number
/// of threads.
class LatentDataset {
 public:
  LatentDataset() = default;
  LatentDataset(std::size_t dim, std::size_t num_actions);

  void append(std::span<const Transition> trajectory);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t num_trajectories() const noexcept { return offsets_.size() - 1; }
  std::size_t total() const noexcept { return actions_.size(); }
  bool empty() const noexcept { return actions_.empty(); }

  std::size_t trajectory_length(std::size_t t) const { return offsets_.at(t + 1) - offsets_.at(t); }
  std::size_t trajectory_offset(std::size_t t) const { return offsets_.at(t); }

  std::size_t global_index(std::size_t trajectory, std::size_t index) const;
  /// Inverse of global_index.
  std::pair<std::size_t, std::size_t> locate(std::size_t global) const;

  TransitionView at(std::size_t global) const;
  TransitionView at(std::size_t trajectory, std::size_t index) const {
    return at(global_index(trajectory, index));
  }
  Trajectory trajectory(std::size_t t) const;

  // Column access, row-major total() x dim().
  std::span<const float> z_rows() const noexcept { return z_; }
  std::span<const float> mu_rows() const noexcept { return mu_; }
  std::span<const float> sigma_rows() const noexcept { return sigma_; }
  std::span<const ActionId> actions() const noexcept { return actions_; }
  /// Per transition, sum_i ln(sigma_i) in double.
  std::span<const double> log_sigma_sums() const noexcept { return log_sigma_sum_; }

  /// First `n` trajectories.
  LatentDataset first_trajectories(std::size_t n) const;
  /// First `n` transitions in storage order; the last kept trajectory may be
  /// truncated.
  LatentDataset first_transitions(std::size_t n) const;

  /// Bitwise equality of every stored field.
  friend bool operator==(const LatentDataset& a, const LatentDataset& b);

 private:
  std::size_t dim_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<float> z_, z_next_, mu_, sigma_, mu_next_, sigma_next_;
  std::vector<ActionId> actions_;
  std::vector<double> log_sigma_sum_;
};

}  // namespace zsworld
