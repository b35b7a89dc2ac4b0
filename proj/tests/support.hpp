#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "zsworld/dataset.hpp"
#include "zsworld/rng.hpp"

namespace testing {

using zsworld::ActionId;
using zsworld::LatentDataset;
using zsworld::Transition;

// Builds one trajectory from len + 1 states: latents z, means mu, stds sigma
// (each states x d) and len actions.
inline std::vector<Transition> chain(const std::vector<std::vector<float>>& z,
                                     const std::vector<std::vector<float>>& mu,
                                     const std::vector<std::vector<float>>& sigma,
                                     const std::vector<ActionId>& actions) {
  std::vector<Transition> out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out.push_back(Transition{z[i], actions[i], z[i + 1], mu[i], sigma[i], mu[i + 1], sigma[i + 1]});
  }
  return out;
}

// Trajectory whose sampled latents equal the means, sigma constant.
inline std::vector<Transition> chain(const std::vector<std::vector<float>>& z,
                                     const std::vector<ActionId>& actions, float sigma = 0.1f) {
  std::vector<std::vector<float>> s(z.size(), std::vector<float>(z.front().size(), sigma));
  return chain(z, z, s, actions);
}

struct RandomSpec {
  std::size_t trajectories = 5;
  std::size_t min_len = 1;
  std::size_t max_len = 20;
  std::size_t d = 4;
  std::size_t actions = 3;
};

inline LatentDataset random_dataset(std::mt19937_64& rng, const RandomSpec& spec) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_real_distribution<float> scale(0.05f, 2.0f);
  std::uniform_int_distribution<std::size_t> length(spec.min_len, spec.max_len);
  std::uniform_int_distribution<ActionId> action(0, static_cast<ActionId>(spec.actions - 1));
  LatentDataset ds(spec.d, spec.actions);
  for (std::size_t t = 0; t < spec.trajectories; ++t) {
    const std::size_t len = length(rng);
    std::vector<std::vector<float>> z(len + 1), mu(len + 1), sigma(len + 1);
    for (std::size_t s = 0; s <= len; ++s) {
      for (std::size_t i = 0; i < spec.d; ++i) {
        mu[s].push_back(normal(rng));
        sigma[s].push_back(scale(rng));
        z[s].push_back(mu[s].back() + sigma[s].back() * normal(rng));
      }
    }
    std::vector<ActionId> acts(len);
    for (auto& a : acts) a = action(rng);
    ds.append(chain(z, mu, sigma, acts));
  }
  return ds;
}

inline std::vector<double> random_query(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> q(d);
  for (auto& v : q) v = normal(rng);
  return q;
}

// Per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("zsworld_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
