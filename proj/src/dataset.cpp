#include "xaibench/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "xaibench/image_io.hpp"
#include "xaibench/parallel.hpp"
#include "xaibench/tensor_io.hpp"

namespace xaibench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kShardFormat = "xaibench-shard/1";
constexpr std::string_view kArchiveFormat = "xaibench-heatmaps/1";
constexpr std::uint64_t kPlanStream = 0x706c616eULL;  // "plan"

std::uint64_t role_key(Role role) { return static_cast<std::uint64_t>(role) + 1; }

std::string numbered(std::string_view prefix, std::size_t index, std::string_view suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu", index);
  return std::string(prefix) + buf + std::string(suffix);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

GroundTruthHeatmap ground_truth_from_tensor(const Tensor& t, const fs::path& path) {
  if (t.shape.size() != 2) {
    throw Error(ErrorKind::kDimensionMismatch, path.string() + ": ground truth must be a rank-2 tensor");
  }
  GroundTruthHeatmap gt(t.shape[0], t.shape[1]);
  std::copy(t.data.begin(), t.data.end(), gt.values().begin());
  return gt;
}

// Parses the shard manifest; images are left unloaded.
Shard parse_manifest(const json& doc, const fs::path& path) {
  try {
    if (doc.at("format").get<std::string>() != kShardFormat) {
      throw Error(ErrorKind::kCorruptFile, path.string() + ": unknown shard format");
    }
    Shard shard;
    shard.role = role_from_name(doc.at("role").get<std::string>());
    shard.index = doc.at("index").get<std::size_t>();
    shard.image_size = doc.at("image_size").get<std::size_t>();
    for (const auto& item : doc.at("samples")) {
      ManifestEntry e;
      e.index = item.at("index").get<std::size_t>();
      e.label = class_from_id(item.at("class").get<int>());
      e.background = background_from_id(item.at("background").get<int>());
      e.seed = item.at("seed").get<std::uint64_t>();
      if (e.index != shard.manifest.size()) {
        throw Error(ErrorKind::kCorruptFile, path.string() + ": sample indices are not sequential");
      }
      shard.manifest.push_back(e);
    }
    return shard;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidArgument) throw Error(ErrorKind::kCorruptFile, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kTrain: return "train";
    case Role::kValidation: return "validation";
    case Role::kEvaluation: return "evaluation";
  }
  return "evaluation";
}

Role role_from_name(std::string_view name) {
  for (Role r : kAllRoles) {
    if (role_name(r) == name) return r;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown dataset role '" + std::string(name) + "'");
}

ShardSpec ShardSpec::defaults(Role role, std::uint64_t seed, std::size_t image_size) {
  ShardSpec spec;
  spec.role = role;
  spec.shard_count = role == Role::kTrain ? 32 : 8;
  spec.samples_per_shard = kDefaultSamplesPerShard;
  spec.seed = seed;
  spec.image_size = image_size;
  return spec;
}

std::vector<ManifestEntry> plan_shard(const ShardSpec& spec, std::size_t index) {
  if (index >= spec.shard_count) {
    throw Error(ErrorKind::kInvalidArgument, "shard index " + std::to_string(index) + " out of range for " +
                                                 std::to_string(spec.shard_count) + " shards");
  }
  Rng rng(derive_seed({spec.seed, role_key(spec.role), index, kPlanStream}));
  std::uniform_int_distribution<int> pick_class(0, kNumClasses - 1);
  std::discrete_distribution<int> pick_background(spec.background_weights.begin(), spec.background_weights.end());
  std::vector<ManifestEntry> plan(spec.samples_per_shard);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    plan[i].index = i;
    plan[i].label = static_cast<CellClass>(pick_class(rng));
    plan[i].background = static_cast<BackgroundType>(pick_background(rng) + 1);
    plan[i].seed = derive_seed({spec.seed, role_key(spec.role), index, i});
  }
  return plan;
}

Shard generate_shard(const ShardSpec& spec, std::size_t index, const GeneratorOptions& opts, unsigned threads) {
  Shard shard;
  shard.role = spec.role;
  shard.index = index;
  shard.image_size = spec.image_size;
  shard.manifest = plan_shard(spec, index);
  GeneratorOptions local = opts;
  local.image_size = spec.image_size;
  shard.samples.resize(shard.manifest.size());
  parallel_for(shard.manifest.size(), threads, [&](std::size_t i) {
    const auto& e = shard.manifest[i];
    shard.samples[i] = compose_sample(e.label, e.background, e.seed, local);
  });
  return shard;
}

fs::path shard_path(const fs::path& root, Role role, std::size_t index) {
  return root / std::string(role_name(role)) / ("shard_" + std::to_string(index));
}

void write_shard(const Shard& shard, const fs::path& dir) {
  if (shard.samples.size() != shard.manifest.size()) {
    throw Error(ErrorKind::kInvalidArgument, "shard samples and manifest differ in length");
  }
  ensure_dir(dir);
  json doc;
  doc["format"] = kShardFormat;
  doc["role"] = role_name(shard.role);
  doc["index"] = shard.index;
  doc["image_size"] = shard.image_size;
  doc["samples"] = json::array();
  for (std::size_t i = 0; i < shard.manifest.size(); ++i) {
    const auto& e = shard.manifest[i];
    const auto& s = shard.samples[i];
    const std::string image_file = numbered("sample_", i, ".ppm");
    const std::string gt_file = numbered("sample_", i, "_gt.fbt");
    write_ppm(s.image, dir / image_file);
    const auto& gt = s.ground_truth;
    write_tensor(Tensor{{gt.rows(), gt.cols()}, {gt.values().begin(), gt.values().end()}}, dir / gt_file);
    doc["samples"].push_back({{"index", e.index},
                              {"class", class_id(e.label)},
                              {"class_name", class_name(e.label)},
                              {"background", background_id(e.background)},
                              {"seed", e.seed},
                              {"image", image_file},
                              {"ground_truth", gt_file}});
  }
  write_text(dir / "manifest.json", doc.dump(1) + "\n");
}

Shard read_shard_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  return parse_manifest(read_json(path), path);
}

Shard read_shard(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  const json doc = read_json(manifest_path);
  Shard shard = parse_manifest(doc, manifest_path);
  shard.samples.reserve(shard.manifest.size());
  const auto& items = doc.at("samples");
  for (std::size_t i = 0; i < shard.manifest.size(); ++i) {
    const auto& e = shard.manifest[i];
    std::string image_file;
    std::string gt_file;
    try {
      image_file = items[i].at("image").get<std::string>();
      gt_file = items[i].at("ground_truth").get<std::string>();
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::kCorruptFile, manifest_path.string() + ": " + ex.what());
    }
    Sample s;
    s.label = e.label;
    s.background = e.background;
    s.seed = e.seed;
    s.image = read_ppm(dir / image_file);
    s.ground_truth = ground_truth_from_tensor(read_tensor(dir / gt_file), dir / gt_file);
    if (s.image.rows() != shard.image_size || s.image.cols() != shard.image_size) {
      throw Error(ErrorKind::kDimensionMismatch, (dir / image_file).string() + ": image is not " +
                                                     std::to_string(shard.image_size) + "px square");
    }
    if (!s.ground_truth.same_shape(s.image)) {
      throw Error(ErrorKind::kDimensionMismatch, (dir / gt_file).string() + ": ground truth and image differ in size");
    }
    shard.samples.push_back(std::move(s));
  }
  return shard;
}

SampleCatalog catalog_of(std::span<const Shard> shards) {
  SampleCatalog catalog;
  for (const auto& shard : shards) {
    for (const auto& e : shard.manifest) {
      catalog[{shard.index, e.index}] = CatalogEntry{shard.image_size, shard.image_size, e.label};
    }
  }
  return catalog;
}

SampleCatalog read_catalog(const fs::path& root, Role role) {
  std::vector<Shard> shards;
  const fs::path base = root / std::string(role_name(role));
  for (std::size_t k = 0;; ++k) {
    const fs::path dir = shard_path(root, role, k);
    if (!fs::exists(dir / "manifest.json")) break;
    shards.push_back(read_shard_manifest(dir));
  }
  if (shards.empty()) throw Error(ErrorKind::kIo, "no shards found under " + base.string());
  return catalog_of(shards);
}

void export_heatmap(const CandidateHeatmap& heatmap, const fs::path& path) { write_tensor(heatmap.to_tensor(), path); }

std::string heatmap_file_name(const SampleRef& ref) {
  return "shard" + std::to_string(ref.shard) + "_" + numbered("sample_", ref.sample, ".fbt");
}

void write_heatmap_manifest(std::string_view method, Role role, std::span<const ArchiveIndexEntry> entries,
                            const fs::path& dir) {
  ensure_dir(dir);
  json doc;
  doc["format"] = kArchiveFormat;
  doc["method"] = method;
  doc["role"] = role_name(role);
  doc["entries"] = json::array();
  for (const auto& e : entries) {
    json item = {{"shard", e.ref.shard}, {"sample", e.ref.sample}, {"file", heatmap_file_name(e.ref)}};
    item["predicted"] = e.predicted ? json(class_id(*e.predicted)) : json(nullptr);
    doc["entries"].push_back(std::move(item));
  }
  write_text(dir / "manifest.json", doc.dump(1) + "\n");
}

void write_heatmap_archive(const HeatmapArchive& archive, const fs::path& dir) {
  ensure_dir(dir);
  std::vector<ArchiveIndexEntry> index;
  for (const auto& [ref, entry] : archive.entries) {
    export_heatmap(entry.heatmap, dir / heatmap_file_name(ref));
    index.push_back({ref, entry.predicted});
  }
  write_heatmap_manifest(archive.method, archive.role, index, dir);
}

ImportResult import_heatmaps(const fs::path& manifest, const SampleCatalog& catalog) {
  const json doc = read_json(manifest);
  ImportResult result;
  const fs::path base = manifest.parent_path();
  json entries;
  try {
    if (doc.at("format").get<std::string>() != kArchiveFormat) {
      throw Error(ErrorKind::kCorruptFile, manifest.string() + ": unknown heatmap archive format");
    }
    result.archive.method = doc.at("method").get<std::string>();
    result.archive.role = role_from_name(doc.value("role", std::string(role_name(Role::kEvaluation))));
    entries = doc.at("entries");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, manifest.string() + ": " + e.what());
  }

  for (const auto& item : entries) {
    SampleRef ref;
    std::string file;
    std::optional<int> predicted;
    try {
      ref.shard = item.at("shard").get<std::size_t>();
      ref.sample = item.at("sample").get<std::size_t>();
      file = item.at("file").get<std::string>();
      if (item.contains("predicted") && !item.at("predicted").is_null()) predicted = item.at("predicted").get<int>();
    } catch (const json::exception& e) {
      result.rejected.push_back({ref, ErrorKind::kCorruptFile, std::string("malformed entry: ") + e.what()});
      continue;
    }

    const auto found = catalog.find(ref);
    if (found == catalog.end()) {
      result.rejected.push_back({ref, ErrorKind::kUnknownReference,
                                 "no sample " + std::to_string(ref.sample) + " in shard " + std::to_string(ref.shard)});
      continue;
    }
    try {
      CandidateHeatmap heatmap = CandidateHeatmap::from_tensor(read_tensor(base / file));
      if (heatmap.rows() != found->second.rows || heatmap.cols() != found->second.cols) {
        std::ostringstream os;
        os << "heatmap is " << heatmap.rows() << "x" << heatmap.cols() << ", sample is " << found->second.rows << "x"
           << found->second.cols;
        throw Error(ErrorKind::kDimensionMismatch, os.str());
      }
      if (!heatmap.all_finite()) throw Error(ErrorKind::kNonFinite, "heatmap contains NaN or infinite values");
      HeatmapEntry entry;
      entry.heatmap = std::move(heatmap);
      if (predicted) {
        entry.predicted = class_from_id(*predicted);
      } else {
        entry.predicted = found->second.label;
        result.warnings.push_back("shard " + std::to_string(ref.shard) + " sample " + std::to_string(ref.sample) +
                                  ": no predicted class, using the true class");
      }
      result.archive.entries[ref] = std::move(entry);
    } catch (const Error& e) {
      result.rejected.push_back({ref, e.kind(), e.what()});
    }
  }
  return result;
}

}  // namespace xaibench
