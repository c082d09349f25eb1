#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xaibench/cellgen.hpp"
#include "xaibench/error.hpp"
#include "xaibench/heatmap.hpp"

namespace xaibench {

enum class Role { kTrain, kValidation, kEvaluation };

inline constexpr std::array<Role, 3> kAllRoles{Role::kTrain, Role::kValidation, Role::kEvaluation};

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

inline constexpr std::size_t kDefaultSamplesPerShard = 200;

struct ShardSpec {
  Role role = Role::kEvaluation;
  std::size_t shard_count = 8;
  std::size_t samples_per_shard = kDefaultSamplesPerShard;
  std::uint64_t seed = 0;
  std::size_t image_size = 224;
  // Relative weights of background types 1, 2, 3.
  std::array<double, 3> background_weights{1.0, 1.0, 1.0};

  /// 32 / 8 / 8 shards of 200 samples for train / validation / evaluation.
  static ShardSpec defaults(Role role, std::uint64_t seed, std::size_t image_size = 224);

  std::size_t total_samples() const { return shard_count * samples_per_shard; }
};

struct ManifestEntry {
  std::size_t index = 0;
  CellClass label = CellClass::kEmpty;
  BackgroundType background = BackgroundType::kDark;
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Shard {
  Role role = Role::kEvaluation;
  std::size_t index = 0;
  std::size_t image_size = 0;
  std::vector<ManifestEntry> manifest;
  std::vector<Sample> samples;
};

/// Draws the per-sample class, background and seed of one shard. Classes are
/// i.i.d. uniform over the 10 classes; deterministic in (spec, index).
std::vector<ManifestEntry> plan_shard(const ShardSpec& spec, std::size_t index);

Shard generate_shard(const ShardSpec& spec, std::size_t index, const GeneratorOptions& opts = {},
                     unsigned threads = 1);

std::filesystem::path shard_path(const std::filesystem::path& root, Role role, std::size_t index);

/// One directory per shard: manifest.json, sample_NNNNN.ppm and
/// sample_NNNNN_gt.fbt.
void write_shard(const Shard& shard, const std::filesystem::path& dir);

/// Throws Error with kIo, kCorruptFile, kBadMagic or kDimensionMismatch.
Shard read_shard(const std::filesystem::path& dir);

/// Reads only the manifest of a shard directory (no images).
Shard read_shard_manifest(const std::filesystem::path& dir);

struct SampleRef {
  std::size_t shard = 0;
  std::size_t sample = 0;
  auto operator<=>(const SampleRef&) const = default;
};

struct CatalogEntry {
  std::size_t rows = 0;
  std::size_t cols = 0;
  CellClass label = CellClass::kEmpty;
};

/// What the importer needs to validate heatmaps against a dataset split.
using SampleCatalog = std::map<SampleRef, CatalogEntry>;

SampleCatalog catalog_of(std::span<const Shard> shards);
/// Catalog of every shard directory of `role` under `root`.
SampleCatalog read_catalog(const std::filesystem::path& root, Role role);

struct HeatmapEntry {
  CandidateHeatmap heatmap;
  CellClass predicted = CellClass::kEmpty;
};

struct HeatmapArchive {
  std::string method;
  Role role = Role::kEvaluation;
  std::map<SampleRef, HeatmapEntry> entries;
};

struct ImportIssue {
  SampleRef ref;
  ErrorKind kind = ErrorKind::kInvalidArgument;
  std::string reason;
};

struct ImportResult {
  HeatmapArchive archive;
  std::vector<ImportIssue> rejected;
  std::vector<std::string> warnings;
};

void export_heatmap(const CandidateHeatmap& heatmap, const std::filesystem::path& path);

/// File name of one heatmap inside an archive directory.
std::string heatmap_file_name(const SampleRef& ref);

struct ArchiveIndexEntry {
  SampleRef ref;
  std::optional<CellClass> predicted;  // written as null when absent
};

/// Writes only `<dir>/manifest.json`; heatmap files are written separately
/// with export_heatmap under heatmap_file_name.
void write_heatmap_manifest(std::string_view method, Role role, std::span<const ArchiveIndexEntry> entries,
                            const std::filesystem::path& dir);

/// Writes `<dir>/manifest.json` plus one FBT1 file per entry.
void write_heatmap_archive(const HeatmapArchive& archive, const std::filesystem::path& dir);

/// Loads an archive manifest and validates each entry against `catalog`.
/// Bad entries are rejected individually; a missing predicted class falls
/// back to the true class with a warning. Throws only when the manifest
/// itself is unreadable.
ImportResult import_heatmaps(const std::filesystem::path& manifest, const SampleCatalog& catalog);

}  // namespace xaibench
