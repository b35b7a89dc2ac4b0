#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/gaussian.hpp"
#include "zsworld/ltd_io.hpp"
#include "zsworld/rng.hpp"

namespace zsworld::synth {

/// Point mass on the unit torus. pos in [0,1)^2, |vel components| <= v_max.
struct WorldState {
  std::array<double, 2> pos{0.0, 0.0};
  std::array<double, 2> vel{0.0, 0.0};
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Action ids. Ids >= kNumBaseActions act as noop.
inline constexpr ActionId kAccelerate = 0;  // speed += dv along the heading
inline constexpr ActionId kBrake = 1;       // speed -= dv, not below zero
inline constexpr ActionId kLeft = 2;        // heading += turn
inline constexpr ActionId kRight = 3;       // heading -= turn
inline constexpr ActionId kNoop = 4;
inline constexpr std::size_t kNumBaseActions = 5;

struct SynthConfig {
  std::size_t d = 16;
  std::size_t num_actions = 5;
  double noise = 0.01;      // velocity noise std per step
  double sigma_obs = 0.05;  // encoder std
  std::uint64_t seed = 0;
  std::uint64_t encoder_seed = 0x5eed;

  double v_max = 0.1;
  double dv = 0.01;
  double turn = 0.4;  // radians per left/right action
  // Std of the encoder's embedding weights.
  double embed_scale = 0.1;
  // The scripted driver laps a circle of this radius around (0.5, 0.5).
  double track_radius = 0.3;
  double track_speed = 0.05;
  double track_gain = 0.5;
  // Fraction of random actions taken by the scripted policy.
  double explore = 0.1;

  /// Throws ContractError unless d >= 4, A >= 2, noise >= 0, sigma_obs > 0.
  void validate() const;

  std::string to_json() const;
  /// Missing keys keep their defaults.
  static SynthConfig from_json(std::string_view text);
  static SynthConfig load(const std::filesystem::path& path);
};

enum class Policy { Random, Scripted };
Policy parse_policy(std::string_view name);

struct SynthDataset {
  LatentDataset data;
  /// states[t] holds len + 1 states; transition (t, i) goes from
  /// states[t][i] to states[t][i + 1].
  std::vector<std::vector<WorldState>> states;
};

/// Closed-form environment plus analytic encoder.
class SynthWorld {
 public:
  explicit SynthWorld(SynthConfig cfg);

  const SynthConfig& config() const noexcept { return cfg_; }

  /// The action changes speed or heading of vel, then N(0, noise) is added
  /// per component and components are clamped to v_max; pos += vel mod 1.
  WorldState step(const WorldState& s, ActionId a, Rng& rng) const;
  WorldState step_noiseless(const WorldState& s, ActionId a) const;

  /// mu = W f(s) with f the torus harmonics of pos and the scaled
  /// velocity; sigma = sigma_obs.
  DiagGaussian encode(const WorldState& s) const;

  /// encode(step_noiseless(s, a)).
  DiagGaussian true_next_dist(const WorldState& s, ActionId a) const;

  /// A start on the track at a random angle, moving along it at track
  /// speed.
  WorldState initial_state(Rng& rng) const;

  /// Greedy track-following action (no exploration).
  ActionId scripted_action(const WorldState& s) const;
  ActionId policy_action(const WorldState& s, Policy policy, Rng& rng) const;

  /// Displacement from `from` to `to` projected on the counter-clockwise
  /// track direction at `from`, in laps of the nominal track.
  double track_progress(const WorldState& from, const WorldState& to) const;

  /// Rolls n_traj episodes of `length` transitions with per-episode seeds
  /// derived from config().seed.
  SynthDataset generate(std::size_t n_traj, std::size_t length,
                        Policy policy) const;

 private:
  std::vector<double> features(const WorldState& s) const;

  SynthConfig cfg_;
  std::vector<double> embedding_;  // d x kFeatures, row-major
};

/// Minimal-image torus distance between positions.
double torus_distance(const std::array<double, 2>& a,
                      const std::array<double, 2>& b);

/// `{"meta": {...}, "trajectories": [[[[px, py], [vx, vy]], ...], ...]}`.
void write_state_log(const std::filesystem::path& path,
                     const std::vector<std::vector<WorldState>>& states,
                     const Provenance& meta = {});
std::vector<std::vector<WorldState>> read_state_log(const std::filesystem::path& path);
std::filesystem::path state_log_path(const std::filesystem::path& ltd_path);

}  // namespace zsworld::synth
