#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "zsworld/harness.hpp"
#include "zsworld/ltd_io.hpp"
#include "zsworld/synthworld.hpp"

namespace fs = std::filesystem;
using zsworld::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result zs(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

bool one_error_line(const std::string& err, int code) {
  static const std::regex re(R"(zsworld: error exit=(\d) kind=[a-z_]+ message="[^"\n]*"\n)");
  std::smatch m;
  return std::regex_match(err, m, re) && std::stoi(m[1]) == code;
}

// Shared fixture: a small train/test pair generated once.
const fs::path& workdir() {
  static const fs::path dir = [] {
    const auto d = testing::scratch_dir("cli");
    const auto s = d.string();
    REQUIRE(zs({"synth", "--out", s + "/train.ltd", "--trajectories", "12", "--length", "40",
                "--seed", "1"}).code == 0);
    REQUIRE(zs({"synth", "--out", s + "/test.ltd", "--trajectories", "4", "--length", "40",
                "--seed", "2"}).code == 0);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("synth writes the dataset, manifest and state log") {
  const auto r = zs({"synth", "--out", at("s.ltd"), "--trajectories", "3", "--length", "10",
                     "--seed", "5", "--d", "8", "--noise", "0.02", "--policy", "random"});
  REQUIRE(r.code == 0);
  const auto ds = zsworld::load_dataset(at("s.ltd"));
  CHECK(ds.dim() == 8);
  CHECK(ds.num_trajectories() == 3);
  CHECK(ds.total() == 30);
  const auto m = zsworld::read_manifest(at("s.ltd"));
  REQUIRE(m);
  CHECK(m->source == "synth:seed=5:policy=random");
  bool has_command = false, has_checksum = false;
  for (const auto& [k, v] : m->meta) {
    if (k == "command") has_command = v.find("synth --out") != std::string::npos;
    if (k == "ltd_checksum") has_checksum = v == zsworld::file_checksum(at("s.ltd"));
  }
  CHECK(has_command);
  CHECK(has_checksum);
  const auto states = zsworld::synth::read_state_log(at("s.states.json"));
  REQUIRE(states.size() == 3);
  CHECK(states[0].size() == 11);
}

TEST_CASE("eval CSV") {
  const auto r = zs({"eval", "--data", at("train.ltd"), "--test", at("test.ltd"), "--method",
                     "l2", "--k", "4", "--mode", "rollout", "--horizon", "6", "--starts", "5",
                     "--seed", "3", "--out", at("eval.csv")});
  REQUIRE(r.code == 0);
  const std::string text = slurp(at("eval.csv"));
  CHECK(text.rfind("# command: zsworld eval --data ", 0) == 0);
  CHECK(text.find("# seed: 3\n") != std::string::npos);
  CHECK(text.find("# dataset_checksum: data=" + zsworld::file_checksum(at("train.ltd")) +
                  " test=" + zsworld::file_checksum(at("test.ltd"))) != std::string::npos);
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "step,kl_mean,kl_var,l1_mean,l1_var,ssim_mean,ssim_var");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].rfind(std::to_string(i) + ",", 0) == 0);
    CHECK(lines[i].substr(lines[i].size() - 4) == ",,,,");
  }
}

TEST_CASE("errors are one machine-parsable line with the contract exit code") {
  SUBCASE("usage") {
    auto r = zs({"eval", "--bogus"});
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err, 2));
    r = zs({});
    CHECK(r.code == 2);
    r = zs({"eval", "--data", at("train.ltd"), "--test", at("test.ltd"), "--method", "cnn",
            "--seed", "1", "--out", at("x.csv")});
    CHECK(r.code == 2);
    CHECK(one_error_line(r.err, 2));
  }
  SUBCASE("missing file") {
    const auto r = zs({"eval", "--data", at("nope.ltd"), "--test", at("test.ltd"), "--method",
                       "kl", "--seed", "1", "--out", at("x.csv")});
    CHECK(r.code == 3);
    CHECK(one_error_line(r.err, 3));
  }
  SUBCASE("incompatible d") {
    REQUIRE(zs({"synth", "--out", at("d8.ltd"), "--trajectories", "2", "--length", "30", "--seed",
                "9", "--d", "8"}).code == 0);
    const auto r = zs({"eval", "--data", at("train.ltd"), "--test", at("d8.ltd"), "--method",
                       "rollout", "--seed", "1", "--out", at("x.csv")});
    CHECK(r.code == 3);
    CHECK(one_error_line(r.err, 3));
  }
  SUBCASE("test set sharing the training source") {
    REQUIRE(zs({"synth", "--out", at("same.ltd"), "--trajectories", "3", "--length", "40",
                "--seed", "1"}).code == 0);
    const auto r = zs({"eval", "--data", at("train.ltd"), "--test", at("same.ltd"), "--method",
                       "rollout", "--seed", "1", "--out", at("x.csv")});
    CHECK(r.code == 3);
    CHECK(r.err.find("shares source") != std::string::npos);
  }
  SUBCASE("empty retrieval") {
    zsworld::LatentDataset train(2, 2), test(2, 2);
    train.append(testing::chain({{0, 0}, {1, 0}, {2, 0}}, {0, 0}));
    test.append(testing::chain({{0, 1}, {1, 1}, {2, 1}}, {1, 1}));
    zsworld::save_dataset(train, at("only0.ltd"));
    zsworld::save_dataset(test, at("only1.ltd"));
    const auto r = zs({"eval", "--data", at("only0.ltd"), "--test", at("only1.ltd"), "--method",
                       "l2", "--horizon", "2", "--starts", "1", "--conditioned", "--seed", "1",
                       "--out", at("x.csv")});
    CHECK(r.code == 4);
    CHECK(one_error_line(r.err, 4));
  }
  SUBCASE("corrupt file") {
    std::ofstream(at("bad.ltd"), std::ios::binary) << "XXXXjunk";
    const auto r = zs({"coverage", "--data", at("bad.ltd")});
    CHECK(r.code == 3);
    CHECK(one_error_line(r.err, 3));
  }
}

TEST_CASE("ablate") {
  const auto dir = workdir() / "ablate";
  fs::create_directories(dir);
  fs::copy_file(at("train.ltd"), dir / "train.ltd", fs::copy_options::overwrite_existing);
  fs::copy_file(at("test.ltd"), dir / "test.ltd", fs::copy_options::overwrite_existing);
  const auto r = zs({"ablate", "--data-dir", dir.string(), "--counts", "2,12", "--horizon", "5",
                     "--starts", "4", "--seed", "0", "--out", at("ablate.csv")});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(slurp(at("ablate.csv")));
  REQUIRE(lines.size() == 1 + 3 * 2 * 2);
  CHECK(lines[0] == "method,trajectories,mode,kl_mean,kl_var");
  CHECK(lines[1].rfind("rollout,2,onestep,", 0) == 0);
  CHECK(lines[12].rfind("kl,12,rollout,", 0) == 0);

  const auto too_many = zs({"ablate", "--data-dir", dir.string(), "--counts", "50", "--seed",
                            "0", "--out", at("ablate2.csv")});
  CHECK(too_many.code == 3);
}

TEST_CASE("coverage and correlate") {
  auto r = zs({"coverage", "--data", at("train.ltd"), "--grid", "16", "--projection-seed", "3",
               "--reference", at("test.ltd"), "--out", at("cov.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(at("cov.json")));
  CHECK(j["grid"] == 16);
  CHECK(j["coverage"].get<double>() > 0.0);
  CHECK(j["coverage"].get<double>() <= 1.0);
  CHECK(j["meta"]["seed"] == 3);
  CHECK(j["meta"]["dataset_checksum"]["reference"] == zsworld::file_checksum(at("test.ltd")));

  std::ofstream(at("pairs.csv")) << "# study\ncoverage,kl\n0.1,9\n0.2,7\n0.3,6.5\n0.5,2\n";
  r = zs({"correlate", "--pairs", at("pairs.csv")});
  REQUIRE(r.code == 0);
  const auto c = nlohmann::json::parse(r.out);
  CHECK(c["n"] == 4);
  CHECK(c["r"].get<double>() < -0.9);

  std::ofstream(at("flat.csv")) << "1,2\n2,2\n3,2\n";
  r = zs({"correlate", "--pairs", at("flat.csv")});
  CHECK(r.code == 3);
  std::ofstream(at("garbage.csv")) << "x,y\n1,2\nfoo,bar\n";
  r = zs({"correlate", "--pairs", at("garbage.csv")});
  CHECK(r.code == 3);
}

TEST_CASE("bench rows increase in N") {
  const auto r = zs({"bench", "--data", at("train.ltd"), "--sizes", "400,100,200,100",
                     "--repeats", "5", "--out", at("bench.csv")});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(slurp(at("bench.csv")));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "n,rollout_median_s,l2_median_s,kl_median_s");
  CHECK(lines[1].rfind("100,", 0) == 0);
  CHECK(lines[2].rfind("200,", 0) == 0);
  CHECK(lines[3].rfind("400,", 0) == 0);
  CHECK(zs({"bench", "--data", at("train.ltd"), "--sizes", "100000", "--out", at("b2.csv")}).code ==
        3);
}

TEST_CASE("plan") {
  std::ofstream(at("env.json")) << zsworld::synth::SynthConfig{}.to_json();
  const auto r = zs({"plan", "--env-config", at("env.json"), "--data", at("train.ltd"),
                     "--method", "kl", "--episodes", "4", "--horizon", "5", "--episode-length",
                     "30", "--seed", "2", "--out", at("plan.csv"), "--summary", at("plan.json")});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(slurp(at("plan.csv")));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "episode,return,random_return");
  const auto j = nlohmann::json::parse(slurp(at("plan.json")));
  for (const char* k : {"mean", "std", "ci_low", "ci_high"}) CHECK(j.contains(k));
  CHECK(j["random"].contains("mean"));
  CHECK(j["ci_low"].get<double>() <= j["mean"].get<double>());
  CHECK(r.out.find("kl: ") == 0);
}

TEST_CASE("identical invocations give byte-identical outputs") {
  const auto twice = [](std::vector<std::string> args, const std::string& file) {
    REQUIRE(zs(args).code == 0);
    const std::string first = slurp(at(file));
    REQUIRE(zs(args).code == 0);
    CHECK(slurp(at(file)) == first);
  };
  twice({"synth", "--out", at("det.ltd"), "--trajectories", "3", "--length", "20", "--seed", "4"},
        "det.ltd");
  CHECK(!slurp(at("det.manifest.json")).empty());
  twice({"eval", "--data", at("train.ltd"), "--test", at("test.ltd"), "--method", "rollout",
         "--seed", "1", "--out", at("det.csv")},
        "det.csv");
  twice({"coverage", "--data", at("train.ltd"), "--out", at("det.json")}, "det.json");
  std::ofstream(at("env.json")) << zsworld::synth::SynthConfig{}.to_json();
  twice({"plan", "--env-config", at("env.json"), "--data", at("train.ltd"), "--method", "rollout",
         "--episodes", "2", "--episode-length", "20", "--seed", "1", "--out", at("detp.csv")},
        "detp.csv");
}
