#include "zsworld/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zsworld/error.hpp"
#include "zsworld/evaluation.hpp"
#include "zsworld/ltd_io.hpp"
#include "zsworld/metrics.hpp"
#include "zsworld/planner.hpp"
#include "zsworld/predictor.hpp"
#include "zsworld/retrieval.hpp"
#include "zsworld/synthworld.hpp"

namespace zsworld::cli {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// What every artifact records about the run that produced it.
struct Meta {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> checksums;
};

std::string quote_arg(const std::string& a) {
  if (!a.empty() && a.find_first_of(" \t\"'\\") == std::string::npos) return a;
  std::string q = "'";
  for (char c : a) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

std::string command_line(const std::vector<std::string>& args) {
  std::string s = "zsworld";
  for (const auto& a : args) s += " " + quote_arg(a);
  return s;
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw DataError("missing file: " + p.string());
}

LatentDataset load_checked(const fs::path& p) {
  require_file(p);
  return load_dataset(p);
}

std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path() && !fs::exists(p.parent_path())) {
    throw DataError("output directory does not exist: " + p.parent_path().string());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

void write_csv_meta(std::ostream& out, const Meta& m) {
  out << "# command: " << m.command << '\n';
  out << "# seed: " << (m.seed ? std::to_string(*m.seed) : std::string("none")) << '\n';
  out << "# dataset_checksum:";
  for (const auto& [name, sum] : m.checksums) out << ' ' << name << '=' << sum;
  out << '\n';
}

ojson meta_json(const Meta& m) {
  ojson j;
  j["command"] = m.command;
  j["seed"] = m.seed ? ojson(*m.seed) : ojson(nullptr);
  ojson sums = ojson::object();
  for (const auto& [name, sum] : m.checksums) sums[name] = sum;
  j["dataset_checksum"] = std::move(sums);
  return j;
}

Provenance meta_fields(const Meta& m) {
  Provenance p{{"command", m.command}, {"seed", m.seed ? std::to_string(*m.seed) : "none"}};
  for (const auto& [name, sum] : m.checksums) p.emplace_back(name + "_checksum", sum);
  return p;
}

// JSON artifacts go to --out when given, else to the report stream.
void emit_json(const ojson& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  auto f = open_output(out_path);
  f << j.dump(2) << '\n';
}

void check_compatible(const LatentDataset& train, const LatentDataset& test) {
  if (train.dim() != test.dim() || train.num_actions() != test.num_actions()) {
    throw DataError("incompatible datasets: training d=" + std::to_string(train.dim()) +
                    " A=" + std::to_string(train.num_actions()) + ", test d=" +
                    std::to_string(test.dim()) + " A=" + std::to_string(test.num_actions()));
  }
}

void check_disjoint(const fs::path& train, const fs::path& test, const std::string& train_sum,
                    const std::string& test_sum) {
  if (train_sum == test_sum) {
    throw DataError("test set " + test.string() + " is identical to the training set");
  }
  const auto a = read_manifest(train);
  const auto b = read_manifest(test);
  if (a && b && !a->source.empty() && a->source == b->source) {
    throw DataError("test set " + test.string() + " shares source '" + a->source +
                    "' with the training set");
  }
}

std::vector<StepStats> series_for(const LatentDataset& train, const Method& method,
                                  const LatentDataset& test, const EvalConfig& cfg,
                                  const std::string& mode) {
  if (mode == "onestep") return evaluate_one_step(train, method, test, cfg).kl;
  return evaluate_long_horizon(train, method, test, cfg).kl;
}

double mean_of(const std::vector<StepStats>& s) {
  double m = 0.0;
  for (const auto& x : s) m += x.mean;
  return m / static_cast<double>(s.size());
}

// Population variance of the per-step means.
double var_of(const std::vector<StepStats>& s) {
  const double m = mean_of(s);
  double v = 0.0;
  for (const auto& x : s) v += (x.mean - m) * (x.mean - m);
  return v / static_cast<double>(s.size());
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// ---- synth ----------------------------------------------------------------

struct SynthOpts {
  std::string out;
  std::size_t trajectories = 0;
  std::size_t length = 100;
  std::uint64_t seed = 0;
  std::optional<double> noise;
  std::optional<std::size_t> d;
  std::optional<std::size_t> actions;
  std::string policy = "scripted";
  std::string env_config;
};

void add_synth(CLI::App& app, SynthOpts& o) {
  auto* c = app.add_subcommand("synth", "Generate a latent dataset from the torus world");
  c->add_option("--out", o.out, "LTD output path")->required();
  c->add_option("--trajectories", o.trajectories)->required()->check(CLI::PositiveNumber);
  c->add_option("--length", o.length, "Transitions per trajectory")->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed)->required();
  c->add_option("--noise", o.noise, "Velocity noise std");
  c->add_option("--d", o.d, "Latent dimension");
  c->add_option("--actions", o.actions, "Action vocabulary size");
  c->add_option("--policy", o.policy)->check(CLI::IsMember({"scripted", "random"}));
  c->add_option("--env-config", o.env_config, "Base world config (JSON)");
}

int run_synth(const SynthOpts& o, const std::string& cmd, std::ostream& out) {
  synth::SynthConfig cfg;
  if (!o.env_config.empty()) {
    require_file(o.env_config);
    cfg = synth::SynthConfig::load(o.env_config);
  }
  cfg.seed = o.seed;
  if (o.noise) cfg.noise = *o.noise;
  if (o.d) cfg.d = *o.d;
  if (o.actions) cfg.num_actions = *o.actions;
  const synth::SynthWorld world(cfg);
  const auto generated = world.generate(o.trajectories, o.length, synth::parse_policy(o.policy));

  const fs::path path = o.out;
  {
    auto f = open_output(path);
    write_ltd(f, generated.data);
  }
  Meta meta{cmd, o.seed, {{"ltd", file_checksum(path)}}};
  Manifest m = make_manifest(generated.data, "synth:seed=" + std::to_string(o.seed) +
                                                 ":policy=" + o.policy);
  m.meta = meta_fields(meta);
  m.meta.emplace_back("world", cfg.to_json());
  write_manifest(m, manifest_path(path));
  synth::write_state_log(synth::state_log_path(path), generated.states, meta_fields(meta));

  out << "wrote " << generated.data.num_trajectories() << " trajectories ("
      << generated.data.total() << " transitions) to " << path.string() << '\n';
  return kExitOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalOpts {
  std::string data, test, method, mode = "onestep", out;
  std::size_t k = kDefaultReplayK;
  std::size_t horizon = kDefaultHorizon;
  std::size_t starts = kDefaultStarts;
  bool conditioned = false;
  bool use_mean = false;
  std::uint64_t seed = 0;
};

void add_eval(CLI::App& app, EvalOpts& o) {
  auto* c = app.add_subcommand("eval", "Per-step KL of predictions on a held-out set");
  c->add_option("--data", o.data, "Training LTD file")->required();
  c->add_option("--test", o.test, "Test LTD file")->required();
  c->add_option("--method", o.method)->required()->check(CLI::IsMember({"rollout", "l2", "kl"}));
  c->add_option("--k", o.k, "Neighbours for l2")->check(CLI::PositiveNumber);
  c->add_option("--mode", o.mode)->check(CLI::IsMember({"onestep", "rollout"}));
  c->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
  c->add_option("--starts", o.starts)->check(CLI::PositiveNumber);
  c->add_flag("--conditioned", o.conditioned, "Restrict retrieval to the test action");
  c->add_flag("--mean", o.use_mean, "Feed back predicted means instead of samples");
  c->add_option("--seed", o.seed)->required();
  c->add_option("--out", o.out, "CSV output path")->required();
}

int run_eval(const EvalOpts& o, const std::string& cmd, std::ostream& out) {
  const LatentDataset train = load_checked(o.data);
  const LatentDataset test = load_checked(o.test);
  check_compatible(train, test);
  Meta meta{cmd, o.seed, {{"data", file_checksum(o.data)}, {"test", file_checksum(o.test)}}};
  check_disjoint(o.data, o.test, meta.checksums[0].second, meta.checksums[1].second);

  EvalConfig cfg;
  cfg.n_starts = o.starts;
  cfg.horizon = o.horizon;
  cfg.conditioned = o.conditioned;
  cfg.seed = o.seed;
  cfg.predict.use_mean = o.use_mean;
  const Method method = Method::parse(o.method, o.k);
  const auto series = series_for(train, method, test, cfg, o.mode);

  auto f = open_output(o.out);
  write_csv_meta(f, meta);
  f << "step,kl_mean,kl_var,l1_mean,l1_var,ssim_mean,ssim_var\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    f << (i + 1) << ',' << format_number(series[i].mean) << ',' << format_number(series[i].var)
      << ",,,,\n";
  }
  out << method.name() << ' ' << o.mode << ": mean KL " << format_number(mean_of(series))
      << " over " << series.size() << " steps\n";
  return kExitOk;
}

// ---- ablate ---------------------------------------------------------------

struct AblateOpts {
  std::string data_dir, out;
  std::vector<std::size_t> counts;
  std::vector<std::string> methods{"rollout", "l2", "kl"};
  std::vector<std::string> modes{"onestep", "rollout"};
  std::size_t k = kDefaultReplayK;
  std::size_t horizon = kDefaultHorizon;
  std::size_t starts = kDefaultStarts;
  bool conditioned = false;
  std::uint64_t seed = 0;
};

void add_ablate(CLI::App& app, AblateOpts& o) {
  auto* c = app.add_subcommand("ablate", "Sweep the number of stored trajectories");
  c->add_option("--data-dir", o.data_dir, "Directory holding train.ltd and test.ltd")->required();
  c->add_option("--counts", o.counts, "Trajectory counts, e.g. 5,10,30")
      ->required()->delimiter(',')->check(CLI::PositiveNumber);
  c->add_option("--methods", o.methods)->delimiter(',')->check(CLI::IsMember({"rollout", "l2", "kl"}));
  c->add_option("--modes", o.modes)->delimiter(',')->check(CLI::IsMember({"onestep", "rollout"}));
  c->add_option("--k", o.k)->check(CLI::PositiveNumber);
  c->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
  c->add_option("--starts", o.starts)->check(CLI::PositiveNumber);
  c->add_flag("--conditioned", o.conditioned);
  c->add_option("--seed", o.seed)->required();
  c->add_option("--out", o.out, "CSV output path")->required();
}

int run_ablate(const AblateOpts& o, const std::string& cmd, std::ostream& out) {
  const fs::path train_path = fs::path(o.data_dir) / "train.ltd";
  const fs::path test_path = fs::path(o.data_dir) / "test.ltd";
  const LatentDataset train = load_checked(train_path);
  const LatentDataset test = load_checked(test_path);
  check_compatible(train, test);
  Meta meta{cmd, o.seed, {{"train", file_checksum(train_path)}, {"test", file_checksum(test_path)}}};
  check_disjoint(train_path, test_path, meta.checksums[0].second, meta.checksums[1].second);
  for (std::size_t n : o.counts) {
    if (n > train.num_trajectories()) {
      throw DataError("count " + std::to_string(n) + " exceeds the " +
                      std::to_string(train.num_trajectories()) + " stored trajectories");
    }
  }

  EvalConfig cfg;
  cfg.n_starts = o.starts;
  cfg.horizon = o.horizon;
  cfg.conditioned = o.conditioned;
  cfg.seed = o.seed;

  auto f = open_output(o.out);
  write_csv_meta(f, meta);
  f << "method,trajectories,mode,kl_mean,kl_var\n";
  for (const auto& name : o.methods) {
    const Method method = Method::parse(name, o.k);
    for (std::size_t n : o.counts) {
      // Nested subsets: every count sees a prefix of the same trajectories.
      const LatentDataset subset = train.first_trajectories(n);
      for (const auto& mode : o.modes) {
        const auto series = series_for(subset, method, test, cfg, mode);
        f << name << ',' << n << ',' << mode << ',' << format_number(mean_of(series)) << ','
          << format_number(var_of(series)) << '\n';
      }
    }
  }
  out << "wrote " << o.methods.size() * o.counts.size() * o.modes.size() << " rows to " << o.out
      << '\n';
  return kExitOk;
}

// ---- coverage / correlate -------------------------------------------------

struct CoverageOpts {
  std::string data, reference, out;
  std::size_t grid = 32;
  std::uint64_t projection_seed = 0;
};

void add_coverage(CLI::App& app, CoverageOpts& o) {
  auto* c = app.add_subcommand("coverage", "Fraction of projected latent sectors occupied");
  c->add_option("--data", o.data)->required();
  c->add_option("--grid", o.grid)->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  c->add_option("--projection-seed", o.projection_seed);
  c->add_option("--reference", o.reference, "Dataset whose bounding box defines the grid");
  c->add_option("--out", o.out, "JSON output path (default stdout)");
}

int run_coverage(const CoverageOpts& o, const std::string& cmd, std::ostream& out) {
  const LatentDataset data = load_checked(o.data);
  Meta meta{cmd, o.projection_seed, {{"data", file_checksum(o.data)}}};
  std::optional<LatentDataset> ref;
  if (!o.reference.empty()) {
    ref = load_checked(o.reference);
    check_compatible(data, *ref);
    meta.checksums.emplace_back("reference", file_checksum(o.reference));
  }
  const CoverageGrid grid(ref ? *ref : data, o.projection_seed, o.grid);
  const double cov = grid.coverage(data);

  ojson j;
  j["coverage"] = cov;
  j["occupied_sectors"] = std::llround(cov * static_cast<double>(o.grid * o.grid));
  j["grid"] = o.grid;
  j["projection_seed"] = o.projection_seed;
  j["transitions"] = data.total();
  j["meta"] = meta_json(meta);
  emit_json(j, o.out, out);
  return kExitOk;
}

struct CorrelateOpts {
  std::string pairs, out;
};

void add_correlate(CLI::App& app, CorrelateOpts& o) {
  auto* c = app.add_subcommand("correlate", "Pearson r of the first two columns of a CSV");
  c->add_option("--pairs", o.pairs)->required();
  c->add_option("--out", o.out, "JSON output path (default stdout)");
}

int run_correlate(const CorrelateOpts& o, const std::string& cmd, std::ostream& out) {
  require_file(o.pairs);
  std::ifstream in(o.pairs, std::ios::binary);
  std::vector<double> xs, ys;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto comma = line.find(',');
    std::optional<double> x, y;
    if (comma != std::string::npos) {
      x = parse_double(std::string_view(line).substr(0, comma));
      const auto rest = std::string_view(line).substr(comma + 1);
      y = parse_double(rest.substr(0, rest.find(',')));
    }
    if (!x || !y) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw DataError(o.pairs + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    header_allowed = false;
    xs.push_back(*x);
    ys.push_back(*y);
  }
  if (xs.size() < 2) throw DataError(o.pairs + ": need at least two pairs");

  Meta meta{cmd, std::nullopt, {{"pairs", file_checksum(o.pairs)}}};
  ojson j;
  j["r"] = pearson(xs, ys);
  j["n"] = xs.size();
  j["meta"] = meta_json(meta);
  emit_json(j, o.out, out);
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOpts {
  std::string data, out;
  std::vector<std::string> methods{"rollout", "l2", "kl"};
  std::vector<std::size_t> sizes;
  std::size_t repeats = 100;
  std::size_t k = kDefaultReplayK;
  std::uint64_t seed = 0;
};

void add_bench(CLI::App& app, BenchOpts& o) {
  auto* c = app.add_subcommand("bench", "Median search time against the number of transitions");
  c->add_option("--data", o.data)->required();
  c->add_option("--methods", o.methods)->delimiter(',')->check(CLI::IsMember({"rollout", "l2", "kl"}));
  c->add_option("--sizes", o.sizes, "Transition counts (prefixes of the data); default all")
      ->delimiter(',')->check(CLI::PositiveNumber);
  c->add_option("--repeats", o.repeats)->check(CLI::PositiveNumber);
  c->add_option("--k", o.k)->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed, "Picks the stored transition used as query");
  c->add_option("--out", o.out, "CSV output path")->required();
}

int run_bench(const BenchOpts& o, const std::string& cmd, std::ostream& out) {
  const LatentDataset data = load_checked(o.data);
  if (data.empty()) throw DataError(o.data + ": no transitions");
  std::vector<std::size_t> sizes = o.sizes.empty() ? std::vector<std::size_t>{data.total()} : o.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.back() > data.total()) {
    throw DataError("size " + std::to_string(sizes.back()) + " exceeds the " +
                    std::to_string(data.total()) + " stored transitions");
  }

  Rng rng(o.seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.total() - 1);
  const TransitionView q = data.at(pick(rng));
  const std::vector<double> query_z(q.z.begin(), q.z.end());
  const DiagGaussian query_dist = q.dist();

  Meta meta{cmd, o.seed, {{"data", file_checksum(o.data)}}};
  auto f = open_output(o.out);
  write_csv_meta(f, meta);
  f << "# repeats: " << o.repeats << '\n';
  f << 'n';
  for (const auto& m : o.methods) f << ',' << m << "_median_s";
  f << '\n';
  for (std::size_t n : sizes) {
    const LatentDataset prefix = data.first_transitions(n);
    f << n;
    for (const auto& m : o.methods) {
      const SearchKind kind = m == "rollout" ? SearchKind::Rollout
                              : m == "l2"    ? SearchKind::L2
                                             : SearchKind::KL;
      f << ',' << format_number(median_scan_time(prefix, query_z, query_dist, kind, o.repeats, o.k));
    }
    f << '\n';
  }
  out << "timed " << sizes.size() << " sizes x " << o.methods.size() << " methods\n";
  return kExitOk;
}

// ---- plan -----------------------------------------------------------------

struct PlanOpts {
  std::string env_config, data, method, out, summary;
  std::size_t k = kDefaultReplayK;
  std::size_t episodes = 50;
  std::size_t horizon = 20;
  std::size_t episode_length = 200;
  std::uint64_t seed = 0;
};

void add_plan(CLI::App& app, PlanOpts& o) {
  auto* c = app.add_subcommand("plan", "Mode-action planning in the torus world");
  c->add_option("--env-config", o.env_config, "World config JSON")->required();
  c->add_option("--data", o.data)->required();
  c->add_option("--method", o.method)->required()->check(CLI::IsMember({"rollout", "l2", "kl"}));
  c->add_option("--k", o.k)->check(CLI::PositiveNumber);
  c->add_option("--episodes", o.episodes)->check(CLI::PositiveNumber);
  c->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
  c->add_option("--episode-length", o.episode_length)->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed)->required();
  c->add_option("--out", o.out, "Returns CSV path")->required();
  c->add_option("--summary", o.summary, "Summary JSON path (default stdout)");
}

ojson summary_json(const ReturnSummary& s) {
  ojson j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["ci_low"] = s.ci_low;
  j["ci_high"] = s.ci_high;
  return j;
}

int run_plan(const PlanOpts& o, const std::string& cmd, std::ostream& out) {
  require_file(o.env_config);
  const synth::SynthWorld env(synth::SynthConfig::load(o.env_config));
  const LatentDataset data = load_checked(o.data);
  PlanConfig cfg;
  cfg.horizon = o.horizon;
  cfg.episodes = o.episodes;
  cfg.episode_length = o.episode_length;
  cfg.method = Method::parse(o.method, o.k);
  cfg.seed = o.seed;
  const PlanningReport report = run_planning_eval(env, data, cfg);

  Meta meta{cmd, o.seed,
            {{"data", file_checksum(o.data)}, {"env_config", file_checksum(o.env_config)}}};
  {
    auto f = open_output(o.out);
    write_csv_meta(f, meta);
    f << "episode,return,random_return\n";
    for (std::size_t e = 0; e < report.returns.size(); ++e) {
      f << e << ',' << format_number(report.returns[e]) << ','
        << format_number(report.random_returns[e]) << '\n';
    }
  }
  ojson j = summary_json(report.summary);
  j["method"] = std::string(cfg.method.name());
  j["episodes"] = cfg.episodes;
  j["horizon"] = cfg.horizon;
  j["random"] = summary_json(report.random_summary);
  j["meta"] = meta_json(meta);
  emit_json(j, o.summary, out);
  if (!o.summary.empty() && o.summary != "-") {
    const auto line = [](const ReturnSummary& s) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.4f +- %.4f (%.4f, %.4f)", s.mean,
                    s.ci_high - s.mean, s.ci_low, s.ci_high);
      return std::string(buf);
    };
    out << cfg.method.name() << ": " << line(report.summary) << "  random: "
        << line(report.random_summary) << '\n';
  }
  return kExitOk;
}

// ---- dispatch -------------------------------------------------------------

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return s;
}

int fail(std::ostream& err, int code, const char* kind, const std::string& msg) {
  err << "zsworld: error exit=" << code << " kind=" << kind << " message=\"" << one_line(msg)
      << "\"\n";
  return code;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-shot world model harness: similarity-search latent dynamics"};
  app.name("zsworld");
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  SynthOpts synth_o;
  EvalOpts eval_o;
  AblateOpts ablate_o;
  CoverageOpts coverage_o;
  CorrelateOpts correlate_o;
  BenchOpts bench_o;
  PlanOpts plan_o;
  add_synth(app, synth_o);
  add_eval(app, eval_o);
  add_ablate(app, ablate_o);
  add_coverage(app, coverage_o);
  add_correlate(app, correlate_o);
  add_bench(app, bench_o);
  add_plan(app, plan_o);

  std::vector<const char*> argv{"zsworld"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  }

  const std::string cmd = command_line(args);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") return run_synth(synth_o, cmd, out);
    if (name == "eval") return run_eval(eval_o, cmd, out);
    if (name == "ablate") return run_ablate(ablate_o, cmd, out);
    if (name == "coverage") return run_coverage(coverage_o, cmd, out);
    if (name == "correlate") return run_correlate(correlate_o, cmd, out);
    if (name == "bench") return run_bench(bench_o, cmd, out);
    if (name == "plan") return run_plan(plan_o, cmd, out);
    return fail(err, kExitUsage, "usage", "unknown command " + name);
  } catch (const ContractError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  } catch (const EmptyRetrievalError& e) {
    return fail(err, kExitEmptyRetrieval, "empty_retrieval", e.what());
  } catch (const DataError& e) {
    return fail(err, kExitData, "data", e.what());
  } catch (const UndefinedCorrelationError& e) {
    return fail(err, kExitData, "data", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitInternal, "internal", e.what());
  }
}

}  // namespace zsworld::cli
