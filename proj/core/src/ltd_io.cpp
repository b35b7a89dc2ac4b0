#include "zsworld/ltd_io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "zsworld/error.hpp"

namespace zsworld {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

void put_f32s(std::ostream& out, std::span<const float> v) {
  for (float x : v) put_u32(out, std::bit_cast<std::uint32_t>(x));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> b{};
    in_.read(reinterpret_cast<char*>(b.data()), 4);
    if (in_.gcount() != 4) throw TruncatedFileError(std::string("LTD: truncated while reading ") + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  void f32s(std::vector<float>& out, std::size_t n, const char* what) {
    out.resize(n);
    for (float& x : out) x = std::bit_cast<float>(u32(what));
  }

 private:
  std::istream& in_;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw ContractError(std::string("LTD: ") + what + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_ltd(std::ostream& out, const LatentDataset& ds) {
  out.write(kLtdMagic, 4);
  put_u32(out, kLtdVersion);
  put_u32(out, checked_u32(ds.dim(), "d"));
  put_u32(out, checked_u32(ds.num_actions(), "A"));
  put_u32(out, checked_u32(ds.num_trajectories(), "trajectory count"));
  for (std::size_t t = 0; t < ds.num_trajectories(); ++t) {
    const std::size_t len = ds.trajectory_length(t);
    put_u32(out, checked_u32(len, "trajectory length"));
    for (std::size_t i = 0; i < len; ++i) {
      const TransitionView v = ds.at(t, i);
      put_f32s(out, v.z);
      put_u32(out, v.action);
      put_f32s(out, v.z_next);
      put_f32s(out, v.mu);
      put_f32s(out, v.sigma);
      put_f32s(out, v.mu_next);
      put_f32s(out, v.sigma_next);
    }
  }
  if (!out) throw DataError("LTD: write failed");
}

LatentDataset read_ltd(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4) throw TruncatedFileError("LTD: truncated while reading magic");
  if (std::memcmp(magic, kLtdMagic, 4) != 0) {
    throw BadMagicError("LTD: bad magic \"" + std::string(magic, 4) + "\"");
  }
  Reader r(in);
  const std::uint32_t version = r.u32("version");
  if (version != kLtdVersion) {
    throw VersionMismatchError("LTD: unsupported version " + std::to_string(version));
  }
  const std::uint32_t d = r.u32("d");
  const std::uint32_t num_actions = r.u32("A");
  const std::uint32_t num_traj = r.u32("trajectory count");
  if (d == 0) throw DataError("LTD: latent dimension is zero");
  if (num_actions == 0) throw DataError("LTD: action count is zero");

  LatentDataset ds(d, num_actions);
  std::vector<Transition> records;
  for (std::uint32_t t = 0; t < num_traj; ++t) {
    const std::uint32_t len = r.u32("trajectory length");
    // Grow as records arrive so a corrupt length cannot force a huge allocation.
    records.clear();
    for (std::uint32_t i = 0; i < len; ++i) {
      Transition& rec = records.emplace_back();
      r.f32s(rec.z, d, "record");
      rec.action = r.u32("record");
      r.f32s(rec.z_next, d, "record");
      r.f32s(rec.mu, d, "record");
      r.f32s(rec.sigma, d, "record");
      r.f32s(rec.mu_next, d, "record");
      r.f32s(rec.sigma_next, d, "record");
    }
    ds.append(records);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("LTD: trailing bytes after the last trajectory");
  }
  return ds;
}

std::filesystem::path manifest_path(const std::filesystem::path& ltd_path) {
  std::filesystem::path p = ltd_path;
  p.replace_extension(".manifest.json");
  return p;
}

Manifest make_manifest(const LatentDataset& ds, std::string source) {
  return Manifest{ds.dim(), ds.num_actions(), ds.num_trajectories(), ds.total(),
                  std::move(source)};
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["d"] = m.d;
  j["A"] = m.num_actions;
  j["num_trajectories"] = m.num_trajectories;
  j["total_transitions"] = m.total_transitions;
  j["source"] = m.source;
  if (!m.meta.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.meta) meta[k] = v;
    j["meta"] = std::move(meta);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::optional<Manifest> read_manifest(const std::filesystem::path& ltd_path) {
  const auto path = manifest_path(ltd_path);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  try {
    const auto j = nlohmann::json::parse(in);
    Manifest m;
    m.d = j.at("d").get<std::uint64_t>();
    m.num_actions = j.at("A").get<std::uint64_t>();
    m.num_trajectories = j.at("num_trajectories").get<std::uint64_t>();
    m.total_transitions = j.at("total_transitions").get<std::uint64_t>();
    m.source = j.value("source", std::string{});
    if (const auto it = j.find("meta"); it != j.end()) {
      for (const auto& [k, v] : it->items()) m.meta.emplace_back(k, v.get<std::string>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
}

void save_dataset(const LatentDataset& ds, const std::filesystem::path& path,
                  const std::optional<std::string>& source) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_ltd(out, ds);
  }
  if (source) write_manifest(make_manifest(ds, *source), manifest_path(path));
}

LatentDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  LatentDataset ds = read_ltd(in);
  if (const auto m = read_manifest(path)) {
    if (m->d != ds.dim() || m->num_actions != ds.num_actions() ||
        m->num_trajectories != ds.num_trajectories() || m->total_transitions != ds.total()) {
      throw ManifestMismatchError("manifest " + manifest_path(path).string() +
                                  " disagrees with " + path.string());
    }
  }
  return ds;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace zsworld
