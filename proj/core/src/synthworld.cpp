#include "zsworld/synthworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "json.hpp"
#include "zsworld/error.hpp"

namespace zsworld::synth {
namespace {

constexpr std::size_t kFeatures = 10;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStartJitter = 0.02;

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

double wrap_half(double x) { return x - std::round(x); }

// Applies an action's speed/heading change to a velocity.
std::array<double, 2> steer(const std::array<double, 2>& vel, ActionId a, double dv, double turn) {
  double speed = std::hypot(vel[0], vel[1]);
  double heading = speed > 0.0 ? std::atan2(vel[1], vel[0]) : 0.0;
  switch (a) {
    case kAccelerate: speed += dv; break;
    case kBrake: speed = std::max(0.0, speed - dv); break;
    case kLeft: heading += turn; break;
    case kRight: heading -= turn; break;
    default: return vel;
  }
  return {speed * std::cos(heading), speed * std::sin(heading)};
}

// Offset of pos from the track centre, minimal image.
std::array<double, 2> from_centre(const WorldState& s) {
  return {wrap_half(s.pos[0] - 0.5), wrap_half(s.pos[1] - 0.5)};
}

}  // namespace

void SynthConfig::validate() const {
  if (d < 4) throw ContractError("synth: d must be at least 4");
  if (num_actions < 2) throw ContractError("synth: A must be at least 2");
  if (!(noise >= 0.0)) throw ContractError("synth: noise must be non-negative");
  if (!(sigma_obs > 0.0)) throw ContractError("synth: sigma_obs must be positive");
  if (!(v_max > 0.0) || !(dv > 0.0) || !(turn >= 0.0)) {
    throw ContractError("synth: v_max and dv must be positive, turn non-negative");
  }
  if (!(embed_scale > 0.0)) throw ContractError("synth: embed_scale must be positive");
  if (!(explore >= 0.0 && explore <= 1.0)) throw ContractError("synth: explore must be in [0, 1]");
}

std::string SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["d"] = d;
  j["A"] = num_actions;
  j["noise"] = noise;
  j["sigma_obs"] = sigma_obs;
  j["seed"] = seed;
  j["encoder_seed"] = encoder_seed;
  j["v_max"] = v_max;
  j["dv"] = dv;
  j["turn"] = turn;
  j["embed_scale"] = embed_scale;
  j["track_radius"] = track_radius;
  j["track_speed"] = track_speed;
  j["track_gain"] = track_gain;
  j["explore"] = explore;
  return j.dump(2);
}

SynthConfig SynthConfig::from_json(std::string_view text) {
  SynthConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DataError("env config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "d") cfg.d = value.get<std::size_t>();
      else if (key == "A") cfg.num_actions = value.get<std::size_t>();
      else if (key == "noise") cfg.noise = value.get<double>();
      else if (key == "sigma_obs") cfg.sigma_obs = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "encoder_seed") cfg.encoder_seed = value.get<std::uint64_t>();
      else if (key == "v_max") cfg.v_max = value.get<double>();
      else if (key == "dv") cfg.dv = value.get<double>();
      else if (key == "turn") cfg.turn = value.get<double>();
      else if (key == "embed_scale") cfg.embed_scale = value.get<double>();
      else if (key == "track_radius") cfg.track_radius = value.get<double>();
      else if (key == "track_speed") cfg.track_speed = value.get<double>();
      else if (key == "track_gain") cfg.track_gain = value.get<double>();
      else if (key == "explore") cfg.explore = value.get<double>();
      else throw DataError("env config: unknown key \"" + key + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("env config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

Policy parse_policy(std::string_view name) {
  if (name == "random") return Policy::Random;
  if (name == "scripted") return Policy::Scripted;
  throw ContractError("unknown policy \"" + std::string(name) + "\" (expected random or scripted)");
}

SynthWorld::SynthWorld(SynthConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(cfg_.encoder_seed);
  std::normal_distribution<double> normal(0.0, cfg_.embed_scale);
  embedding_.resize(cfg_.d * kFeatures);
  for (double& w : embedding_) w = normal(rng);
}

WorldState SynthWorld::step_noiseless(const WorldState& s, ActionId a) const {
  WorldState next = s;
  const auto vel = steer(s.vel, a, cfg_.dv, cfg_.turn);
  for (int axis = 0; axis < 2; ++axis) {
    next.vel[axis] = std::clamp(vel[axis], -cfg_.v_max, cfg_.v_max);
    next.pos[axis] = wrap_unit(s.pos[axis] + next.vel[axis]);
  }
  return next;
}

WorldState SynthWorld::step(const WorldState& s, ActionId a, Rng& rng) const {
  if (cfg_.noise == 0.0) return step_noiseless(s, a);
  std::normal_distribution<double> normal(0.0, cfg_.noise);
  WorldState next = s;
  const auto vel = steer(s.vel, a, cfg_.dv, cfg_.turn);
  for (int axis = 0; axis < 2; ++axis) {
    next.vel[axis] = std::clamp(vel[axis] + normal(rng), -cfg_.v_max, cfg_.v_max);
    next.pos[axis] = wrap_unit(s.pos[axis] + next.vel[axis]);
  }
  return next;
}

std::vector<double> SynthWorld::features(const WorldState& s) const {
  const double x = kTwoPi * s.pos[0], y = kTwoPi * s.pos[1];
  return {std::cos(x),       std::sin(x),       std::cos(y),       std::sin(y),
          std::cos(2.0 * x), std::sin(2.0 * x), std::cos(2.0 * y), std::sin(2.0 * y),
          s.vel[0] / cfg_.v_max, s.vel[1] / cfg_.v_max};
}

DiagGaussian SynthWorld::encode(const WorldState& s) const {
  const auto f = features(s);
  std::vector<double> mu(cfg_.d, 0.0);
  for (std::size_t j = 0; j < cfg_.d; ++j) {
    for (std::size_t m = 0; m < kFeatures; ++m) mu[j] += embedding_[j * kFeatures + m] * f[m];
  }
  return DiagGaussian(std::move(mu), std::vector<double>(cfg_.d, cfg_.sigma_obs));
}

DiagGaussian SynthWorld::true_next_dist(const WorldState& s, ActionId a) const {
  return encode(step_noiseless(s, a));
}

WorldState SynthWorld::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> jitter(-kStartJitter, kStartJitter);
  const double theta = angle(rng);
  const double r = cfg_.track_radius + jitter(rng);
  WorldState s;
  s.pos = {wrap_unit(0.5 + r * std::cos(theta)), wrap_unit(0.5 + r * std::sin(theta))};
  s.vel = {-cfg_.track_speed * std::sin(theta), cfg_.track_speed * std::cos(theta)};
  return s;
}

ActionId SynthWorld::scripted_action(const WorldState& s) const {
  const auto off = from_centre(s);
  const double radius = std::hypot(off[0], off[1]);
  std::array<double, 2> tangent{1.0, 0.0}, inward{0.0, 0.0};
  if (radius > 1e-12) {
    tangent = {-off[1] / radius, off[0] / radius};
    inward = {-off[0] / radius, -off[1] / radius};
  }
  const double pull = cfg_.track_gain * (radius - cfg_.track_radius);
  const std::array<double, 2> desired{cfg_.track_speed * tangent[0] + pull * inward[0],
                                      cfg_.track_speed * tangent[1] + pull * inward[1]};

  const ActionId usable = static_cast<ActionId>(std::min(cfg_.num_actions, kNumBaseActions));
  ActionId best = 0;
  double best_err = INFINITY;
  for (ActionId a = 0; a < usable; ++a) {
    const WorldState next = step_noiseless(s, a);
    const double ex = next.vel[0] - desired[0], ey = next.vel[1] - desired[1];
    const double err = ex * ex + ey * ey;
    if (err < best_err) {
      best_err = err;
      best = a;
    }
  }
  return best;
}

ActionId SynthWorld::policy_action(const WorldState& s, Policy policy, Rng& rng) const {
  std::uniform_int_distribution<ActionId> any(0, static_cast<ActionId>(cfg_.num_actions - 1));
  if (policy == Policy::Random) return any(rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < cfg_.explore) return any(rng);
  return scripted_action(s);
}

double SynthWorld::track_progress(const WorldState& from, const WorldState& to) const {
  const auto off = from_centre(from);
  const double radius = std::hypot(off[0], off[1]);
  if (radius <= 1e-12) return 0.0;
  const double dx = wrap_half(to.pos[0] - from.pos[0]);
  const double dy = wrap_half(to.pos[1] - from.pos[1]);
  const double along = (-off[1] * dx + off[0] * dy) / radius;
  return along / (kTwoPi * cfg_.track_radius);
}

SynthDataset SynthWorld::generate(std::size_t n_traj, std::size_t length, Policy policy) const {
  if (n_traj == 0 || length == 0) throw ContractError("generate: need n_traj, length >= 1");
  SynthDataset out{LatentDataset(cfg_.d, cfg_.num_actions), {}};
  out.states.reserve(n_traj);

  auto to_f32 = [](std::span<const double> v) { return std::vector<float>(v.begin(), v.end()); };

  for (std::size_t e = 0; e < n_traj; ++e) {
    Rng rng(derive_seed(cfg_.seed, {e}));
    std::vector<WorldState> states{initial_state(rng)};
    std::vector<ActionId> actions;
    for (std::size_t i = 0; i < length; ++i) {
      actions.push_back(policy_action(states.back(), policy, rng));
      states.push_back(step(states.back(), actions.back(), rng));
    }

    std::vector<std::vector<float>> z, mu, sigma;
    for (const WorldState& s : states) {
      const DiagGaussian g = encode(s);
      z.push_back(to_f32(sample(g, rng)));
      mu.push_back(to_f32(g.mu()));
      sigma.push_back(to_f32(g.sigma()));
    }
    std::vector<Transition> transitions(length);
    for (std::size_t i = 0; i < length; ++i) {
      transitions[i] = Transition{z[i], actions[i], z[i + 1], mu[i], sigma[i], mu[i + 1], sigma[i + 1]};
    }
    out.data.append(transitions);
    out.states.push_back(std::move(states));
  }
  return out;
}

double torus_distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(wrap_half(a[0] - b[0]), wrap_half(a[1] - b[1]));
}

void write_state_log(const std::filesystem::path& path,
                     const std::vector<std::vector<WorldState>>& states,
                     const Provenance& meta) {
  nlohmann::ordered_json j;
  if (!meta.empty()) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    j["meta"] = std::move(m);
  }
  nlohmann::ordered_json& trajs = j["trajectories"] = nlohmann::ordered_json::array();
  for (const auto& traj : states) {
    nlohmann::ordered_json t = nlohmann::ordered_json::array();
    for (const WorldState& s : traj) {
      t.push_back({{s.pos[0], s.pos[1]}, {s.vel[0], s.vel[1]}});
    }
    trajs.push_back(std::move(t));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

std::vector<std::vector<WorldState>> read_state_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<WorldState>> out;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& t : j.at("trajectories")) {
      auto& traj = out.emplace_back();
      for (const auto& s : t) {
        traj.push_back(WorldState{{s.at(0).at(0).get<double>(), s.at(0).at(1).get<double>()},
                                  {s.at(1).at(0).get<double>(), s.at(1).at(1).get<double>()}});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("state log " + path.string() + ": " + e.what());
  }
  return out;
}

std::filesystem::path state_log_path(const std::filesystem::path& ltd_path) {
  std::filesystem::path p = ltd_path;
  p.replace_extension(".states.json");
  return p;
}

}  // namespace zsworld::synth
