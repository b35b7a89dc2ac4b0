#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zsworld/dataset.hpp"

namespace zsworld {

// LTD binary layout, little-endian:
//
//   "LTD1" | u32 version=1 | u32 d | u32 A | u32 num_trajectories
//   per trajectory: u32 length L, then L records of
//     z[d] f32 | action u32 | z_next[d] f32 | mu[d] f32 | sigma[d] f32 |
//     mu_next[d] f32 | sigma_next[d] f32
inline constexpr char kLtdMagic[4] = {'L', 'T', 'D', '1'};
inline constexpr std::uint32_t kLtdVersion = 1;

/// Free-form key/value provenance (command line, seed, checksum) written
/// into JSON sidecars under "meta".
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Sidecar `<stem>.manifest.json`, used only for validation.
struct Manifest {
  std::uint64_t d = 0;
  std::uint64_t num_actions = 0;
  std::uint64_t num_trajectories = 0;
  std::uint64_t total_transitions = 0;
  std::string source;
  Provenance meta;
};

void write_ltd(std::ostream& out, const LatentDataset& ds);
/// Header fields are validated before any record is read. Throws
/// BadMagicError, VersionMismatchError, TruncatedFileError,
/// ActionOutOfRangeError or InvariantViolationError.
LatentDataset read_ltd(std::istream& in);

/// Writes the LTD file and, when `source` is set, the manifest sidecar.
void save_dataset(const LatentDataset& ds, const std::filesystem::path& path,
                  const std::optional<std::string>& source = std::nullopt);
/// Loads and, if a manifest sidecar exists, cross-checks it
/// (ManifestMismatchError on disagreement).
LatentDataset load_dataset(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& ltd_path);
Manifest make_manifest(const LatentDataset& ds, std::string source);
void write_manifest(const Manifest& m, const std::filesystem::path& path);
std::optional<Manifest> read_manifest(const std::filesystem::path& ltd_path);

/// 64-bit FNV-1a over the file bytes, as 16 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace zsworld
