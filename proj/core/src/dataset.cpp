#include "zsworld/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "zsworld/error.hpp"

namespace zsworld {
namespace {

std::vector<double> widen(std::span<const float> v) { return {v.begin(), v.end()}; }

bool bitwise_equal(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
}

template <typename T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

template <typename T>
std::span<const T> row(const std::vector<T>& v, std::size_t i, std::size_t d) {
  return std::span<const T>(v).subspan(i * d, d);
}

}  // namespace

DiagGaussian Transition::dist() const { return DiagGaussian(widen(mu), widen(sigma)); }
DiagGaussian Transition::dist_next() const {
  return DiagGaussian(widen(mu_next), widen(sigma_next));
}

DiagGaussian TransitionView::dist() const { return DiagGaussian(widen(mu), widen(sigma)); }
DiagGaussian TransitionView::dist_next() const {
  return DiagGaussian(widen(mu_next), widen(sigma_next));
}

Transition TransitionView::to_transition() const {
  Transition t;
  t.z.assign(z.begin(), z.end());
  t.action = action;
  t.z_next.assign(z_next.begin(), z_next.end());
  t.mu.assign(mu.begin(), mu.end());
  t.sigma.assign(sigma.begin(), sigma.end());
  t.mu_next.assign(mu_next.begin(), mu_next.end());
  t.sigma_next.assign(sigma_next.begin(), sigma_next.end());
  return t;
}

LatentDataset::LatentDataset(std::size_t dim, std::size_t num_actions)
    : dim_(dim), num_actions_(num_actions) {
  if (dim == 0) throw ContractError("LatentDataset: latent dimension must be positive");
  if (num_actions == 0) throw ContractError("LatentDataset: action count must be positive");
}

void LatentDataset::append(std::span<const Transition> trajectory) {
  const std::size_t t = num_trajectories();
  if (trajectory.empty()) throw InvariantViolationError("empty trajectory", t, 0);

  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Transition& tr = trajectory[i];
    for (const auto* v : {&tr.z, &tr.z_next, &tr.mu, &tr.sigma, &tr.mu_next, &tr.sigma_next}) {
      if (v->size() != dim_) {
        throw InvariantViolationError("vector of dimension " + std::to_string(v->size()) +
                                          ", expected " + std::to_string(dim_),
                                      t, i);
      }
      for (float x : *v) {
        if (!std::isfinite(x)) throw InvariantViolationError("non-finite value", t, i);
      }
    }
    for (const auto* s : {&tr.sigma, &tr.sigma_next}) {
      for (float x : *s) {
        if (!(x > 0.0f)) {
          throw InvariantViolationError("non-positive sigma " + std::to_string(x), t, i);
        }
      }
    }
    if (tr.action >= num_actions_) {
      throw ActionOutOfRangeError("action " + std::to_string(tr.action) + " >= A=" +
                                  std::to_string(num_actions_) + " (trajectory " +
                                  std::to_string(t) + ", index " + std::to_string(i) + ")");
    }
    if (i + 1 < trajectory.size()) {
      const Transition& next = trajectory[i + 1];
      if (!bitwise_equal(std::span<const float>(tr.z_next), next.z) ||
          !bitwise_equal(std::span<const float>(tr.mu_next), next.mu) ||
          !bitwise_equal(std::span<const float>(tr.sigma_next), next.sigma)) {
        throw InvariantViolationError("successor does not match next transition", t, i);
      }
    }
  }

  for (const Transition& tr : trajectory) {
    z_.insert(z_.end(), tr.z.begin(), tr.z.end());
    z_next_.insert(z_next_.end(), tr.z_next.begin(), tr.z_next.end());
    mu_.insert(mu_.end(), tr.mu.begin(), tr.mu.end());
    sigma_.insert(sigma_.end(), tr.sigma.begin(), tr.sigma.end());
    mu_next_.insert(mu_next_.end(), tr.mu_next.begin(), tr.mu_next.end());
    sigma_next_.insert(sigma_next_.end(), tr.sigma_next.begin(), tr.sigma_next.end());
    actions_.push_back(tr.action);
    double log_sum = 0.0;
    for (float s : tr.sigma) log_sum += std::log(static_cast<double>(s));
    log_sigma_sum_.push_back(log_sum);
  }
  offsets_.push_back(actions_.size());
}

std::size_t LatentDataset::global_index(std::size_t trajectory, std::size_t index) const {
  if (trajectory >= num_trajectories() || index >= trajectory_length(trajectory)) {
    throw ContractError("transition (" + std::to_string(trajectory) + ", " +
                        std::to_string(index) + ") does not exist");
  }
  return offsets_[trajectory] + index;
}

std::pair<std::size_t, std::size_t> LatentDataset::locate(std::size_t global) const {
  if (global >= total()) throw ContractError("transition index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  const auto t = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {t, global - offsets_[t]};
}

TransitionView LatentDataset::at(std::size_t g) const {
  if (g >= total()) throw ContractError("transition index out of range");
  return TransitionView{row(z_, g, dim_),     actions_[g],          row(z_next_, g, dim_),
                        row(mu_, g, dim_),    row(sigma_, g, dim_), row(mu_next_, g, dim_),
                        row(sigma_next_, g, dim_)};
}

Trajectory LatentDataset::trajectory(std::size_t t) const {
  Trajectory out;
  out.id = static_cast<std::uint32_t>(t);
  const std::size_t len = trajectory_length(t);
  out.transitions.reserve(len);
  for (std::size_t i = 0; i < len; ++i) out.transitions.push_back(at(offsets_[t] + i).to_transition());
  return out;
}

LatentDataset LatentDataset::first_trajectories(std::size_t n) const {
  if (n > num_trajectories()) {
    throw ContractError("requested " + std::to_string(n) + " trajectories, dataset has " +
                        std::to_string(num_trajectories()));
  }
  return first_transitions(offsets_[n]);
}

LatentDataset LatentDataset::first_transitions(std::size_t n) const {
  if (n > total()) throw ContractError("requested more transitions than stored");
  LatentDataset out(dim_, num_actions_);
  for (std::size_t t = 0; t < num_trajectories() && offsets_[t] < n; ++t) {
    Trajectory tr = trajectory(t);
    tr.transitions.resize(std::min(tr.transitions.size(), n - offsets_[t]));
    out.append(tr.transitions);
  }
  return out;
}

bool operator==(const LatentDataset& a, const LatentDataset& b) {
  return a.dim_ == b.dim_ && a.num_actions_ == b.num_actions_ && a.offsets_ == b.offsets_ &&
         a.actions_ == b.actions_ && bitwise_equal(a.z_, b.z_) &&
         bitwise_equal(a.z_next_, b.z_next_) && bitwise_equal(a.mu_, b.mu_) &&
         bitwise_equal(a.sigma_, b.sigma_) && bitwise_equal(a.mu_next_, b.mu_next_) &&
         bitwise_equal(a.sigma_next_, b.sigma_next_);
}

}  // namespace zsworld
