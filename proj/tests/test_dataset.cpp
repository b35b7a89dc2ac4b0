#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "zsworld/error.hpp"
#include "zsworld/ltd_io.hpp"

using namespace zsworld;

namespace {

std::string to_bytes(const LatentDataset& ds) {
  std::ostringstream out(std::ios::binary);
  write_ltd(out, ds);
  return out.str();
}

LatentDataset from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_ltd(in);
}

void put_u32(std::string& bytes, std::size_t at, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) bytes[at + b] = static_cast<char>((v >> (8 * b)) & 0xff);
}

void put_f32(std::string& bytes, std::size_t at, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(bytes, at, u);
}

LatentDataset tiny() {
  LatentDataset ds(2, 3);
  ds.append(testing::chain({{0, 0}, {1, 0}, {2, 0}}, {0, 1}));
  ds.append(testing::chain({{5, 5}, {6, 5}}, {2}));
  return ds;
}

}  // namespace

TEST_CASE("LatentDataset layout") {
  const LatentDataset ds = tiny();
  CHECK(ds.dim() == 2);
  CHECK(ds.num_actions() == 3);
  CHECK(ds.num_trajectories() == 2);
  CHECK(ds.total() == 3);
  CHECK(ds.trajectory_length(0) == 2);
  CHECK(ds.trajectory_offset(1) == 2);
  CHECK(ds.global_index(1, 0) == 2);
  CHECK(ds.locate(2) == std::pair<std::size_t, std::size_t>{1, 0});
  CHECK(ds.at(0, 1).z[0] == 1.0f);
  CHECK(ds.at(0, 1).z_next[0] == 2.0f);
  CHECK(ds.at(1, 0).action == 2);
  CHECK(ds.trajectory(0).transitions.size() == 2);
  CHECK(ds.trajectory(0).transitions[1] == ds.at(0, 1).to_transition());
  CHECK_THROWS(ds.global_index(0, 2));

  // total == sum of lengths; first_* keep prefixes.
  CHECK(ds.first_trajectories(1).total() == 2);
  CHECK(ds.first_transitions(1).total() == 1);
  CHECK(ds.first_transitions(3) == ds);
  CHECK(ds.first_trajectories(2) == ds);
}

TEST_CASE("append validates every record") {
  LatentDataset ds(2, 3);
  SUBCASE("dimension") {
    CHECK_THROWS_AS(ds.append(testing::chain({{0, 0, 0}, {1, 0, 0}}, {0})), InvariantViolationError);
  }
  SUBCASE("empty trajectory") {
    CHECK_THROWS(ds.append(std::vector<Transition>{}));
  }
  SUBCASE("action out of range") {
    CHECK_THROWS_AS(ds.append(testing::chain({{0, 0}, {1, 0}}, {3})), ActionOutOfRangeError);
  }
  SUBCASE("sigma must be positive") {
    auto tr = testing::chain({{0, 0}, {1, 0}, {2, 0}}, {0, 0});
    tr[1].sigma[1] = -1.0f;
    tr[0].sigma_next[1] = -1.0f;
    try {
      ds.append(tr);
      FAIL("expected InvariantViolationError");
    } catch (const InvariantViolationError& e) {
      CHECK(e.trajectory() == 0);
      CHECK(e.index() == 0);  // the first record that carries the bad value
    }
  }
  SUBCASE("non-finite value") {
    auto tr = testing::chain({{0, 0}, {1, 0}}, {0});
    tr[0].z[0] = NAN;
    CHECK_THROWS_AS(ds.append(tr), InvariantViolationError);
  }
  SUBCASE("successor chain") {
    auto tr = testing::chain({{0, 0}, {1, 0}, {2, 0}}, {0, 0});
    tr[1].z[0] = 1.5f;
    CHECK_THROWS_AS(ds.append(tr), InvariantViolationError);
    auto tr2 = testing::chain({{0, 0}, {1, 0}, {2, 0}}, {0, 0});
    tr2[0].mu_next[1] = 0.25f;
    CHECK_THROWS_AS(ds.append(tr2), InvariantViolationError);
  }
  CHECK(ds.empty());
}

TEST_CASE("LTD round trip is bitwise") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ds = testing::random_dataset(rng, {1 + static_cast<std::size_t>(trial % 7), 1, 30,
                                                  1 + static_cast<std::size_t>(trial % 5), 4});
    const std::string bytes = to_bytes(ds);
    const LatentDataset back = from_bytes(bytes);
    CHECK(back == ds);
    CHECK(to_bytes(back) == bytes);
  }

  const auto dir = testing::scratch_dir("ltd");
  const auto ds = tiny();
  save_dataset(ds, dir / "a.ltd");
  CHECK(load_dataset(dir / "a.ltd") == ds);
  CHECK_FALSE(std::filesystem::exists(dir / "a.manifest.json"));
  save_dataset(ds, dir / "b.ltd", std::string("unit"));
  CHECK(load_dataset(dir / "b.ltd") == ds);
  const auto m = read_manifest(dir / "b.ltd");
  REQUIRE(m);
  CHECK(m->d == 2);
  CHECK(m->num_actions == 3);
  CHECK(m->num_trajectories == 2);
  CHECK(m->total_transitions == 3);
  CHECK(m->source == "unit");
  CHECK(file_checksum(dir / "a.ltd") == file_checksum(dir / "b.ltd"));
  CHECK(file_checksum(dir / "a.ltd").size() == 16);
}

TEST_CASE("LTD byte layout") {
  const std::string b = to_bytes(tiny());
  // header 20 bytes, then per trajectory 4 + L * (6 d * 4 + 4)
  CHECK(b.size() == 20 + (4 + 2 * 52) + (4 + 1 * 52));
  CHECK(b.substr(0, 4) == "LTD1");
  CHECK(b[4] == 1);
  CHECK(b[8] == 2);
  CHECK(b[12] == 3);
  CHECK(b[16] == 2);
  CHECK(b[20] == 2);
  float z1;
  std::memcpy(&z1, b.data() + 24 + 52, 4);  // z[0] of the second record
  CHECK(z1 == 1.0f);
  std::uint32_t action;
  std::memcpy(&action, b.data() + 24 + 52 + 8, 4);
  CHECK(action == 1);
}

TEST_CASE("LTD loader errors") {
  const std::string good = to_bytes(tiny());
  SUBCASE("bad magic") {
    std::string b = good;
    b.replace(0, 4, "XXXX");
    CHECK_THROWS_AS(from_bytes(b), BadMagicError);
  }
  SUBCASE("version") {
    std::string b = good;
    put_u32(b, 4, 2);
    CHECK_THROWS_AS(from_bytes(b), VersionMismatchError);
  }
  SUBCASE("truncated") {
    CHECK_THROWS_AS(from_bytes(good.substr(0, good.size() - 3)), TruncatedFileError);
    CHECK_THROWS_AS(from_bytes(good.substr(0, 10)), TruncatedFileError);
  }
  SUBCASE("huge declared length is reported as truncation") {
    std::string b = good;
    put_u32(b, 20, 0xffffffffu);
    CHECK_THROWS_AS(from_bytes(b), TruncatedFileError);
  }
  SUBCASE("action >= A") {
    std::string b = good;
    put_u32(b, 24 + 8, 7);
    CHECK_THROWS_AS(from_bytes(b), ActionOutOfRangeError);
  }
  SUBCASE("negative sigma names trajectory and index") {
    std::string b = good;
    // sigma[0] of trajectory 1, record 0: after z, action, z_next, mu.
    const std::size_t rec = 20 + 4 + 2 * 52 + 4;
    put_f32(b, rec + 8 + 4 + 8 + 8, -1.0f);
    try {
      from_bytes(b);
      FAIL("expected InvariantViolationError");
    } catch (const InvariantViolationError& e) {
      CHECK(e.trajectory() == 1);
      CHECK(e.index() == 0);
    }
  }
  SUBCASE("trailing bytes") {
    CHECK_THROWS_AS(from_bytes(good + "x"), DataError);
  }
  SUBCASE("manifest disagreement") {
    const auto dir = testing::scratch_dir("manifest");
    save_dataset(tiny(), dir / "m.ltd", std::string("x"));
    auto m = *read_manifest(dir / "m.ltd");
    m.total_transitions = 99;
    write_manifest(m, manifest_path(dir / "m.ltd"));
    CHECK_THROWS_AS(load_dataset(dir / "m.ltd"), ManifestMismatchError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/none.ltd"), DataError);
  }
}
