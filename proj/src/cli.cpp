#include "xaibench/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xaibench/dataset.hpp"
#include "xaibench/image_io.hpp"
#include "xaibench/parallel.hpp"
#include "xaibench/pipeline.hpp"
#include "xaibench/report.hpp"
#include "xaibench/scoring.hpp"
#include "xaibench/synthgen.hpp"

namespace xaibench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kAbsSuffix = "+abs";

struct CommonOptions {
  std::string root = "xaibench-data";
  unsigned threads = 0;
};

struct GenerateOptions {
  std::uint64_t seed = 0;
  std::size_t size = 224;
  std::size_t samples_per_shard = kDefaultSamplesPerShard;
  std::optional<std::size_t> train_shards;
  std::optional<std::size_t> validation_shards;
  std::optional<std::size_t> evaluation_shards;
};

struct ExportOptions {
  std::string method;
  std::string role = "evaluation";
  std::string out;
};

struct ScoreOptions {
  std::vector<std::string> methods;
  std::string role = "evaluation";
  std::string family;
  std::vector<double> clamp;
  bool abs = false;
  std::string mode = "partition";
  std::string out = "results";
  std::optional<std::size_t> max_shards;
};

struct ReportOptions {
  std::string out = "results";
  std::size_t gallery_shard = 0;
  bool no_gallery = false;
};

std::size_t count_shards(const fs::path& root, Role role) {
  std::size_t k = 0;
  while (fs::exists(shard_path(root, role, k) / "manifest.json")) ++k;
  if (k == 0) {
    throw Error(ErrorKind::kIo, "no " + std::string(role_name(role)) + " shards under " + root.string());
  }
  return k;
}

std::string sanitize(std::string_view tag) {
  std::string out;
  for (char c : tag) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out;
}

fs::path archive_manifest(const fs::path& root, const std::string& tag) {
  fs::path p(tag);
  if (fs::is_regular_file(p)) return p;
  if (fs::is_regular_file(p / "manifest.json")) return p / "manifest.json";
  return root / "heatmaps" / sanitize(tag) / "manifest.json";
}

bool is_mock(std::string_view tag) { return tag.starts_with("mock:"); }

ScoringConfig scoring_config(const ScoreOptions& o, unsigned threads) {
  ScoringConfig config;
  config.threads = threads;
  config.abs_transform = o.abs;
  if (o.mode == "partition") {
    config.mode = CountingMode::kPartition;
  } else if (o.mode == "literal") {
    config.mode = CountingMode::kLiteral;
  } else {
    throw Error(ErrorKind::kInvalidArgument, "--mode must be partition or literal");
  }
  if (!o.clamp.empty()) {
    if (o.clamp.size() != 2 || !(o.clamp[0] < 0.0 && o.clamp[1] > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "--clamp needs c1 < 0 < c2");
    }
    if (o.family == "standard") {
      throw Error(ErrorKind::kInvalidArgument, "--clamp selects the clamped family; drop --family standard");
    }
    config.family = FamilyKind::kClamped;
    config.clamp = ClampBounds{o.clamp[0], o.clamp[1]};
  } else if (!o.family.empty()) {
    config.family = family_from_name(o.family);
    if (config.family == FamilyKind::kClamped) config.clamp = ClampBounds{};
  }
  return config;
}

void print_class_counts(std::ostream& out, const std::array<std::size_t, kNumClasses>& counts) {
  out << "  classes:";
  for (std::size_t c = 0; c < counts.size(); ++c) out << ' ' << c << '=' << counts[c];
  out << '\n';
}

int cmd_generate(const CommonOptions& common, const GenerateOptions& o, std::ostream& out) {
  if (o.size < 32) throw Error(ErrorKind::kInvalidArgument, "--size must be at least 32");
  if (o.samples_per_shard == 0) throw Error(ErrorKind::kInvalidArgument, "--samples-per-shard must be positive");
  const fs::path root(common.root);
  json summary;
  summary["format"] = "xaibench-dataset/1";
  summary["seed"] = o.seed;
  summary["image_size"] = o.size;
  summary["samples_per_shard"] = o.samples_per_shard;
  std::size_t grand_total = 0;

  for (Role role : kAllRoles) {
    ShardSpec spec = ShardSpec::defaults(role, o.seed, o.size);
    spec.samples_per_shard = o.samples_per_shard;
    const auto& override_count = role == Role::kTrain        ? o.train_shards
                                 : role == Role::kValidation ? o.validation_shards
                                                             : o.evaluation_shards;
    if (override_count) spec.shard_count = *override_count;

    std::array<std::size_t, kNumClasses> counts{};
    for (std::size_t k = 0; k < spec.shard_count; ++k) {
      const Shard shard = generate_shard(spec, k, GeneratorOptions{}, common.threads);
      write_shard(shard, shard_path(root, role, k));
      for (const auto& e : shard.manifest) ++counts[static_cast<std::size_t>(class_id(e.label))];
    }
    const std::string name(role_name(role));
    summary["roles"][name] = {{"shards", spec.shard_count},
                              {"samples", spec.total_samples()},
                              {"class_counts", counts}};
    grand_total += spec.total_samples();
    out << name << ": " << spec.shard_count << " shards, " << spec.total_samples() << " samples\n";
    print_class_counts(out, counts);
  }
  summary["total_samples"] = grand_total;
  std::ofstream file(root / "dataset.json", std::ios::trunc);
  file << summary.dump(1) << '\n';
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + (root / "dataset.json").string());
  out << "wrote " << grand_total << " samples under " << root.string() << '\n';
  return kExitOk;
}

int cmd_export(const CommonOptions& common, const ExportOptions& o, std::ostream& out) {
  const MockMethod method = MockMethod::parse(o.method);
  const Role role = role_from_name(o.role);
  const fs::path root(common.root);
  const fs::path dir = o.out.empty() ? root / "heatmaps" / sanitize(method.tag()) : fs::path(o.out);
  const std::size_t shards = count_shards(root, role);

  std::vector<ArchiveIndexEntry> index;
  fs::create_directories(dir);
  for (std::size_t k = 0; k < shards; ++k) {
    const Shard shard = read_shard(shard_path(root, role, k));
    std::vector<ArchiveIndexEntry> local(shard.samples.size());
    parallel_for(shard.samples.size(), common.threads, [&](std::size_t i) {
      const Sample& s = shard.samples[i];
      const SampleRef ref{k, i};
      export_heatmap(mock_heatmap(method, s, mock_seed(s, method)), dir / heatmap_file_name(ref));
      local[i] = {ref, s.label};
    });
    index.insert(index.end(), local.begin(), local.end());
  }
  write_heatmap_manifest(method.tag(), role, index, dir);
  out << "exported " << index.size() << " heatmaps for " << method.tag() << " to " << dir.string() << '\n';
  return kExitOk;
}

bool record_less(const ScoreRecord& a, const ScoreRecord& b) {
  return std::tie(a.method, a.shard, a.sample, a.m) < std::tie(b.method, b.shard, b.sample, b.m);
}

int cmd_score(const CommonOptions& common, const ScoreOptions& o, std::ostream& out, std::ostream& err) {
  if (o.methods.empty()) throw Error(ErrorKind::kInvalidArgument, "at least one --method is required");
  const ScoringConfig config = scoring_config(o, common.threads);
  const Role role = role_from_name(o.role);
  const fs::path root(common.root);
  std::size_t shards = count_shards(root, role);
  if (o.max_shards) shards = std::min(shards, *o.max_shards);

  // Archives are imported once against the catalog of the scored split.
  std::vector<HeatmapArchive> archives;
  std::vector<HeatmapSource> sources;
  std::vector<std::string> archive_tags;
  for (const auto& tag : o.methods) {
    if (is_mock(tag)) continue;
    const fs::path manifest = archive_manifest(root, tag);
    if (!fs::exists(manifest)) throw Error(ErrorKind::kIo, "no heatmap archive for '" + tag + "' at " + manifest.string());
    if (archives.empty()) archives.reserve(o.methods.size());
    ImportResult imported = import_heatmaps(manifest, read_catalog(root, role));
    for (const auto& issue : imported.rejected) {
      err << "rejected " << tag << " shard " << issue.ref.shard << " sample " << issue.ref.sample << " ("
          << to_string(issue.kind) << "): " << issue.reason << '\n';
    }
    for (const auto& w : imported.warnings) err << "warning: " << w << '\n';
    archives.push_back(std::move(imported.archive));
  }
  std::size_t next_archive = 0;
  for (const auto& tag : o.methods) {
    sources.push_back(is_mock(tag) ? HeatmapSource::from_mock(MockMethod::parse(tag))
                                   : HeatmapSource::from_archive(archives[next_archive++]));
  }

  std::set<std::string> labels;
  for (const auto& s : sources) {
    const std::string label = method_label(s, config);
    if (!labels.insert(label).second) throw Error(ErrorKind::kInvalidArgument, "method '" + label + "' given twice");
  }

  std::vector<ScoreRecord> records;
  std::size_t missing = 0;
  for (std::size_t k = 0; k < shards; ++k) {
    const Shard shard = read_shard(shard_path(root, role, k));
    for (const auto& source : sources) {
      ShardScores scored = score_shard(shard, source, config);
      for (const auto& m : scored.missing) err << "missing: " << method_label(source, config) << ": " << m << '\n';
      missing += scored.missing.size();
      records.insert(records.end(), scored.records.begin(), scored.records.end());
    }
  }
  records = round_records(records);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  const fs::path detail = dir / detail_csv_name(config.family);
  if (fs::exists(detail)) {
    for (auto& r : read_detail_csv(detail)) {
      if (!labels.contains(r.method)) records.push_back(std::move(r));
    }
  }
  std::sort(records.begin(), records.end(), record_less);

  const auto aggregates = aggregate_all(records);
  const auto summary = summarize(aggregates);
  write_detail_csv(records, detail);
  write_aggregate_csv(aggregates, dir / aggregate_csv_name(config.family));
  write_summary_csv(summary, config.family, dir / summary_csv_name(config.family));

  out << "family " << family_name(config.family) << " (" << ThresholdFamily::of(config.family).size()
      << " members), " << shards << " " << role_name(role) << " shards\n";
  for (const auto& s : summary) {
    if (!labels.contains(s.method)) continue;
    out << "  " << s.method << ": samples=" << s.samples << " P_avg=" << format_sig6(s.precision_avg.mean)
        << " R_avg=" << format_sig6(s.recall_avg.mean) << " P_best=" << format_sig6(s.precision_best.mean)
        << " R_best=" << format_sig6(s.recall_best.mean) << '\n';
  }
  if (missing > 0) out << "  " << missing << " samples had no usable heatmap (listed on stderr)\n";
  out << "wrote " << detail.string() << '\n';
  return kExitOk;
}

std::vector<ScoreRecord> read_if_present(const fs::path& path) {
  return fs::exists(path) ? read_detail_csv(path) : std::vector<ScoreRecord>{};
}

// Resolves a score-record method label back to a heatmap source for the
// gallery. Returns nullopt when the source cannot be reconstructed.
std::optional<HeatmapSource> gallery_source(const fs::path& root, std::string label, Role role, bool& abs,
                                            std::vector<HeatmapArchive>& keep) {
  abs = label.ends_with(kAbsSuffix);
  if (abs) label.resize(label.size() - std::string_view(kAbsSuffix).size());
  if (is_mock(label)) return HeatmapSource::from_mock(MockMethod::parse(label));
  const fs::path manifest = archive_manifest(root, label);
  if (!fs::exists(manifest)) return std::nullopt;
  keep.push_back(import_heatmaps(manifest, read_catalog(root, role)).archive);
  return HeatmapSource::from_archive(keep.back());
}

void render_galleries(const CommonOptions& common, const ReportOptions& o, FamilyKind family,
                      const std::vector<ScoreRecord>& records, std::ostream& out, std::ostream& err) {
  const fs::path root(common.root);
  const fs::path dir = shard_path(root, Role::kEvaluation, o.gallery_shard);
  if (!fs::exists(dir / "manifest.json")) {
    err << "warning: no dataset shard at " << dir.string() << "; galleries skipped\n";
    return;
  }
  const Shard shard = read_shard(dir);
  std::vector<std::size_t> picks;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto it = std::find_if(shard.samples.begin(), shard.samples.end(),
                                 [&](const Sample& s) { return class_id(s.label) == c; });
    if (it != shard.samples.end()) picks.push_back(static_cast<std::size_t>(it - shard.samples.begin()));
  }

  std::set<std::string> methods;
  for (const auto& r : records) methods.insert(r.method);
  std::vector<HeatmapArchive> keep;
  keep.reserve(methods.size());
  for (const auto& label : methods) {
    ScoringConfig config;
    config.family = family;
    if (family == FamilyKind::kClamped) config.clamp = ClampBounds{};
    std::optional<HeatmapSource> source = gallery_source(root, label, Role::kEvaluation, config.abs_transform, keep);
    if (!source) {
      err << "warning: no heatmaps found for '" << label << "'; gallery skipped\n";
      continue;
    }
    std::vector<Image> rows;
    for (std::size_t i : picks) {
      const Sample& s = shard.samples[i];
      if (source->mock) {
        rows.push_back(gallery_row(s, mock_heatmap(*source->mock, s, mock_seed(s, *source->mock)), config));
      } else if (const auto e = source->archive->entries.find({shard.index, i}); e != source->archive->entries.end()) {
        rows.push_back(gallery_row(s, e->second.heatmap, config));
      }
    }
    const fs::path path =
        fs::path(o.out) / ("gallery_" + std::string(family_name(family)) + "_" + sanitize(label) + ".ppm");
    write_ppm(stack_rows(rows), path);
    out << "wrote " << path.string() << '\n';
  }
}

int cmd_report(const CommonOptions& common, const ReportOptions& o, std::ostream& out, std::ostream& err) {
  const fs::path dir(o.out);
  const auto standard = read_if_present(dir / detail_csv_name(FamilyKind::kStandard));
  const auto clamped = read_if_present(dir / detail_csv_name(FamilyKind::kClamped));
  if (standard.empty() && clamped.empty()) {
    throw Error(ErrorKind::kIo, "no score CSVs in " + dir.string() + "; run 'score' first");
  }

  const auto scatter = scatter_rows(standard, clamped);
  write_scatter_csv(scatter, dir / "scatter.csv");
  out << "wrote " << (dir / "scatter.csv").string() << " (" << scatter.size() << " points)\n";
  for (const auto& [family, records] :
       {std::pair{FamilyKind::kStandard, &standard}, std::pair{FamilyKind::kClamped, &clamped}}) {
    if (records->empty()) continue;
    const fs::path path = dir / roc_csv_name(family);
    write_roc_csv(*records, ThresholdFamily::of(family), path);
    out << "wrote " << path.string() << '\n';
    if (!o.no_gallery) render_galleries(common, o, family, *records, out, err);
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--root", common.root, "Dataset root directory")->envname("XAIBENCH_ROOT");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kCorruptFile:
    case ErrorKind::kBadMagic:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kNonFinite: return kExitFormat;
    case ErrorKind::kUnknownReference:
    case ErrorKind::kIncomplete: return kExitReference;
  }
  return kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic-cell benchmark for attribution heatmaps"};
  app.require_subcommand(1);

  CommonOptions common;
  GenerateOptions gen;
  ExportOptions exp;
  ScoreOptions score;
  ReportOptions report;

  auto* generate = app.add_subcommand("generate", "Generate train/validation/evaluation shards");
  add_common(generate, common);
  generate->add_option("--seed", gen.seed, "Global seed")->envname("XAIBENCH_SEED");
  generate->add_option("--size", gen.size, "Image side length in pixels");
  generate->add_option("--samples-per-shard", gen.samples_per_shard, "Samples per shard");
  generate->add_option("--train-shards", gen.train_shards, "Override the train shard count");
  generate->add_option("--validation-shards", gen.validation_shards, "Override the validation shard count");
  generate->add_option("--evaluation-shards", gen.evaluation_shards, "Override the evaluation shard count");

  auto* mock = app.add_subcommand("mock", "Export a mock method's heatmaps as an archive");
  add_common(mock, common);
  mock->add_option("--method", exp.method, "Mock method, e.g. mock:dropout:0.5")->required();
  mock->add_option("--role", exp.role, "Dataset split")->check(CLI::IsMember({"train", "validation", "evaluation"}));
  mock->add_option("--out", exp.out, "Archive directory (default <root>/heatmaps/<tag>)");

  auto* scorer = app.add_subcommand("score", "Score heatmaps against the ground truth");
  add_common(scorer, common);
  scorer->add_option("--method", score.methods, "Archive tag or path, or mock:kind[:params]")->required();
  scorer->add_option("--role", score.role, "Dataset split")->check(CLI::IsMember({"train", "validation", "evaluation"}));
  scorer->add_option("--family", score.family, "Threshold family")->check(CLI::IsMember({"standard", "clamped"}));
  scorer->add_option("--clamp", score.clamp, "Clamp bounds c1 c2 (selects the clamped family)")->expected(2);
  scorer->add_flag("--abs", score.abs, "Take |h| before channel adjustment");
  scorer->add_option("--mode", score.mode, "FP counting mode")->check(CLI::IsMember({"partition", "literal"}));
  scorer->add_option("--out", score.out, "Output directory for CSVs");
  scorer->add_option("--max-shards", score.max_shards, "Score only the first N shards");

  auto* reporter = app.add_subcommand("report", "Scatter, ROC and gallery outputs from score CSVs");
  add_common(reporter, common);
  reporter->add_option("--out", report.out, "Directory holding the score CSVs; outputs go here too");
  reporter->add_option("--gallery-shard", report.gallery_shard, "Evaluation shard used for galleries");
  reporter->add_flag("--no-gallery", report.no_gallery, "Skip gallery rendering");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(common, gen, out);
    if (mock->parsed()) return cmd_export(common, exp, out);
    if (scorer->parsed()) return cmd_score(common, score, out, err);
    if (reporter->parsed()) return cmd_report(common, report, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace xaibench
