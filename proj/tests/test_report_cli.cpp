#include <gtest/gtest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "xaibench/cli.hpp"
#include "xaibench/dataset.hpp"
#include "xaibench/image_io.hpp"
#include "xaibench/report.hpp"
#include "xaibench/tensor_io.hpp"

namespace xaibench {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xaibench");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ScoreRecord rec(std::size_t sample, std::size_t m, double r, const std::string& method = "mock:perfect") {
  return ScoreRecord{0, sample, 2, 2, method, m, 0.987654321, 0.5, r, 0.0123456789};
}

TEST(Csv, SixSignificantDigits) {
  EXPECT_EQ(format_sig6(0.987654321), "0.987654");
  EXPECT_EQ(format_sig6(1.0), "1");
  EXPECT_EQ(format_sig6(0.0), "0");
  EXPECT_EQ(format_sig6(1.0 / (2.0 + 1e-6)), "0.5");
  EXPECT_EQ(format_sig6(1.23456789e-7), "1.23457e-07");
}

TEST(Csv, DetailRoundTripEqualsRoundedRecords) {
  TempDir tmp("csv_rt");
  std::vector<ScoreRecord> rs{rec(0, 0, 1.0 / 3.0), rec(0, 1, 2.0 / 3.0), rec(1, 0, 0.1)};
  write_detail_csv(rs, tmp.path() / "d.csv");
  EXPECT_EQ(lines_of(tmp.path() / "d.csv").front(), kDetailHeader);
  const auto back = read_detail_csv(tmp.path() / "d.csv");
  const auto rounded = round_records(rs);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].method, rounded[i].method);
    EXPECT_EQ(back[i].m, rounded[i].m);
    EXPECT_EQ(back[i].recall, rounded[i].recall);
    EXPECT_EQ(back[i].accuracy, rounded[i].accuracy);
    EXPECT_EQ(back[i].fpr, rounded[i].fpr);
  }
}

TEST(Csv, RejectsBadHeaderAndRows) {
  TempDir tmp("csv_bad");
  std::ofstream(tmp.path() / "h.csv") << "a,b\n";
  EXPECT_THROW(read_detail_csv(tmp.path() / "h.csv"), Error);
  std::ofstream(tmp.path() / "r.csv") << kDetailHeader << "\n0,0,1,1,x,0,0.5,0.5,zz,0\n";
  try {
    read_detail_csv(tmp.path() / "r.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorruptFile);
  }
}

TEST(Csv, MethodTagsWithCommasAreRefused) {
  TempDir tmp("csv_comma");
  std::vector<ScoreRecord> rs{rec(0, 0, 1.0, "a,b")};
  EXPECT_THROW(write_detail_csv(rs, tmp.path() / "d.csv"), Error);
}

TEST(Scatter, VariantsAndBounds) {
  std::vector<ScoreRecord> standard, clamped;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t m = 0; m < 56; ++m) standard.push_back(rec(s, m, m == 0 ? 1.0 : 0.5));
    for (std::size_t m = 0; m < 41; ++m) clamped.push_back(rec(s, m, 0.25));
  }
  const auto rows = scatter_rows(standard, clamped);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].variant, "avg");
  EXPECT_NEAR(rows[0].r_stat, (1.0 + 55 * 0.5) / 56.0, 1e-12);
  EXPECT_EQ(rows[1].variant, "best");
  EXPECT_EQ(rows[1].r_stat, 1.0);
  EXPECT_EQ(rows[2].variant, "clamped_best");
  EXPECT_EQ(rows[2].r_stat, 0.25);
  for (const auto& r : rows) {
    for (double v : {r.p_stat, r.r_stat, r.std_p, r.std_r}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Colormap, DivergingRedWhiteBlue) {
  EXPECT_EQ(diverging_color(1.0), (Rgb{1.0f, 0.0f, 0.0f}));
  EXPECT_EQ(diverging_color(0.0), (Rgb{1.0f, 1.0f, 1.0f}));
  EXPECT_EQ(diverging_color(-1.0), (Rgb{0.0f, 0.0f, 1.0f}));
  EXPECT_EQ(diverging_color(-0.5), (Rgb{0.5f, 0.5f, 1.0f}));
}

TEST(Gallery, RowHasOneTilePerColumn) {
  GeneratorOptions opts;
  opts.image_size = 64;
  const auto s = compose_sample(CellClass::kRCell, BackgroundType::kDark, 3, opts);
  ScoringConfig config;
  const auto one = gallery_row(s, CandidateHeatmap::from_plane(s.ground_truth), config);
  EXPECT_EQ(one.rows(), 64u);
  EXPECT_EQ(one.cols(), 6u * 64u + 5u * 2u);
  const auto three = gallery_row(s, CandidateHeatmap(3, 64, 64, 0.1f), config);
  EXPECT_EQ(three.cols(), 8u * 64u + 7u * 2u);
}

TEST(Gallery, RedRectangleTileShowsRedDominantBorder) {
  GeneratorOptions opts;
  opts.image_size = 64;
  const auto composed = compose_sample_detailed(CellClass::kRCell, BackgroundType::kDark, 4, opts);
  const auto row = gallery_row(composed.sample, CandidateHeatmap::from_plane(composed.sample.ground_truth), {});
  double red = 0.0, green = 0.0, blue = 0.0;
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 64; ++c) {
      if (!composed.layers.border(r, c)) continue;
      red += row.at(r, c, 0);
      green += row.at(r, c, 1);
      blue += row.at(r, c, 2);
    }
  }
  EXPECT_GT(red, 2.0 * green);
  EXPECT_GT(red, 2.0 * blue);
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tmp_ = new TempDir("cli");
    const auto r = cli({"generate", "--root", root().string(), "--seed", "5", "--size", "64", "--train-shards", "1",
                        "--validation-shards", "1", "--evaluation-shards", "2", "--samples-per-shard", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete tmp_;
    tmp_ = nullptr;
  }
  static fs::path root() { return tmp_->path() / "data"; }
  static fs::path results() { return tmp_->path() / "results"; }

  static TempDir* tmp_;
};

TempDir* CliTest::tmp_ = nullptr;

TEST_F(CliTest, GenerateWritesShardsAndSummary) {
  EXPECT_TRUE(fs::exists(shard_path(root(), Role::kTrain, 0) / "manifest.json"));
  EXPECT_TRUE(fs::exists(shard_path(root(), Role::kEvaluation, 1) / "manifest.json"));
  EXPECT_FALSE(fs::exists(shard_path(root(), Role::kEvaluation, 2)));
  const auto doc = nlohmann::json::parse(slurp(root() / "dataset.json"));
  EXPECT_EQ(doc["total_samples"], 80);
  EXPECT_EQ(doc["roles"]["evaluation"]["shards"], 2);
}

TEST_F(CliTest, RegenerationIsByteIdentical) {
  const fs::path again = tmp_->path() / "again";
  const auto r = cli({"generate", "--root", again.string(), "--seed", "5", "--size", "64", "--train-shards", "1",
                      "--validation-shards", "1", "--evaluation-shards", "2", "--samples-per-shard", "20",
                      "--threads", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& entry : fs::recursive_directory_iterator(root())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root());
    if (rel.begin()->string() == "heatmaps") continue;
    ASSERT_EQ(slurp(entry.path()), slurp(again / rel)) << rel;
  }
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::vector<std::string> tail{"--size", "64", "--train-shards", "0", "--validation-shards", "0",
                                      "--evaluation-shards", "1", "--samples-per-shard", "3"};
  auto run = [&](const fs::path& dir, std::vector<std::string> extra) {
    std::vector<std::string> args{"generate", "--root", dir.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    args.insert(args.end(), tail.begin(), tail.end());
    return cli(args);
  };
  ::setenv("XAIBENCH_SEED", "5", 1);
  const auto from_env = run(tmp_->path() / "env", {});
  ::unsetenv("XAIBENCH_SEED");
  ASSERT_EQ(from_env.code, 0) << from_env.err;
  ASSERT_EQ(run(tmp_->path() / "flag", {"--seed", "5"}).code, 0);
  ASSERT_EQ(run(tmp_->path() / "other", {"--seed", "6"}).code, 0);
  const auto manifest = [&](const char* name) {
    return slurp(shard_path(tmp_->path() / name, Role::kEvaluation, 0) / "manifest.json");
  };
  EXPECT_EQ(manifest("env"), manifest("flag"));
  EXPECT_NE(manifest("env"), manifest("other"));
}

TEST_F(CliTest, ScoreWritesDetailAggregateAndSummary) {
  const auto r = cli({"score", "--root", root().string(), "--method", "mock:perfect", "--method", "mock:zero",
                      "--out", results().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto detail = lines_of(results() / "detail_standard.csv");
  EXPECT_EQ(detail.size(), 1u + 2u * 40u * 56u);
  const auto aggregate = lines_of(results() / "aggregate_standard.csv");
  EXPECT_EQ(aggregate.size(), 1u + 2u * 40u);

  const auto records = read_detail_csv(results() / "detail_standard.csv");
  std::vector<ScoreRecord> perfect_nonempty;
  for (const auto& rr : records) {
    if (rr.method == "mock:perfect" && rr.true_class != 9) perfect_nonempty.push_back(rr);
  }
  for (const auto& s : summarize(aggregate_all(perfect_nonempty))) EXPECT_GT(s.recall_best.mean, 0.999);
}

TEST_F(CliTest, ReportOutputsAreRecomputableFromDetail) {
  ASSERT_EQ(cli({"score", "--root", root().string(), "--method", "mock:perfect", "--method", "mock:zero", "--out",
                 results().string()})
                .code,
            0);
  const auto records = read_detail_csv(results() / "detail_standard.csv");
  const fs::path check = tmp_->path() / "recomputed.csv";
  write_aggregate_csv(aggregate_all(records), check);
  EXPECT_EQ(slurp(check), slurp(results() / "aggregate_standard.csv"));
  write_summary_csv(summarize(aggregate_all(records)), FamilyKind::kStandard, check);
  EXPECT_EQ(slurp(check), slurp(results() / "summary_standard.csv"));

  const auto r = cli({"report", "--root", root().string(), "--out", results().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto roc = lines_of(results() / "roc_standard.csv");
  EXPECT_EQ(roc.size(), 1u + 2u * 56u);
  write_roc_csv(records, ThresholdFamily::standard(), check);
  EXPECT_EQ(slurp(check), slurp(results() / "roc_standard.csv"));
  EXPECT_TRUE(fs::exists(results() / "gallery_standard_mock_perfect.ppm"));
  const Image gallery = read_ppm(results() / "gallery_standard_mock_perfect.ppm");
  EXPECT_GT(gallery.rows(), 64u);
}

TEST_F(CliTest, ClampSelectsClampedFamily) {
  const fs::path out = tmp_->path() / "clamped";
  const auto r = cli({"score", "--root", root().string(), "--method", "mock:dropout:0.5", "--clamp", "-0.1", "0.1",
                      "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(out / "detail_clamped.csv").size(), 1u + 40u * 41u);
  EXPECT_FALSE(fs::exists(out / "detail_standard.csv"));
}

TEST_F(CliTest, RescoringReplacesOnlyThatMethod) {
  const fs::path out = tmp_->path() / "merge";
  ASSERT_EQ(cli({"score", "--root", root().string(), "--method", "mock:zero", "--out", out.string()}).code, 0);
  ASSERT_EQ(cli({"score", "--root", root().string(), "--method", "mock:perfect", "--out", out.string()}).code, 0);
  ASSERT_EQ(cli({"score", "--root", root().string(), "--method", "mock:perfect", "--out", out.string()}).code, 0);
  EXPECT_EQ(lines_of(out / "detail_standard.csv").size(), 1u + 2u * 40u * 56u);
}

TEST_F(CliTest, ArchiveScoringMatchesMockScoring) {
  const fs::path archive = tmp_->path() / "archive";
  ASSERT_EQ(cli({"mock", "--root", root().string(), "--method", "mock:dropout:0.5", "--out", archive.string()}).code,
            0);
  fs::remove(archive / heatmap_file_name({1, 3}));
  const fs::path from_mock = tmp_->path() / "from_mock";
  const fs::path from_archive = tmp_->path() / "from_archive";
  ASSERT_EQ(cli({"score", "--root", root().string(), "--method", "mock:dropout:0.5", "--out", from_mock.string()})
                .code,
            0);
  const auto r = cli({"score", "--root", root().string(), "--method", archive.string(), "--out",
                      from_archive.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("shard 1 sample 3"), std::string::npos) << r.err;

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> mock;
  for (const auto& rr : read_detail_csv(from_mock / "detail_standard.csv")) mock[{rr.shard, rr.sample, rr.m}] = rr.recall;
  const auto imported = read_detail_csv(from_archive / "detail_standard.csv");
  EXPECT_EQ(imported.size(), 39u * 56u);
  for (const auto& rr : imported) {
    EXPECT_EQ(rr.method, "mock:dropout:0.5");
    EXPECT_EQ(rr.recall, mock.at({rr.shard, rr.sample, rr.m}));
  }
}

TEST_F(CliTest, DuplicateMethodLabelsAreRefused) {
  EXPECT_EQ(cli({"score", "--root", root().string(), "--method", "mock:zero", "--method", "mock:zero", "--out",
                 (tmp_->path() / "dup").string()})
                .code,
            kExitUsage);
}

TEST_F(CliTest, ErrorsMapToCategoryExitCodes) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"score", "--root", root().string(), "--method", "mock:bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"score", "--root", root().string(), "--method", "mock:perfect", "--family", "standard", "--clamp",
                 "-0.1", "0.1", "--out", (tmp_->path() / "x").string()})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"score", "--root", (tmp_->path() / "nowhere").string(), "--method", "mock:perfect"}).code, kExitIo);
  EXPECT_EQ(cli({"report", "--out", (tmp_->path() / "empty").string()}).code, kExitIo);

  const fs::path broken = tmp_->path() / "broken";
  fs::copy(root(), broken, fs::copy_options::recursive);
  write_file_bytes(shard_path(broken, Role::kEvaluation, 0) / "sample_00000_gt.fbt",
                   std::vector<std::byte>(4, std::byte{'Z'}));
  EXPECT_EQ(cli({"score", "--root", broken.string(), "--method", "mock:perfect", "--out",
                 (tmp_->path() / "y").string()})
                .code,
            kExitFormat);
  EXPECT_EQ(exit_code_for(ErrorKind::kUnknownReference), kExitReference);
}

TEST(CliSize, LargeImagesFollowSizeFlag) {
  TempDir tmp("cli_size");
  const auto r = cli({"generate", "--root", tmp.path().string(), "--size", "512", "--train-shards", "0",
                      "--validation-shards", "0", "--evaluation-shards", "1", "--samples-per-shard", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Shard s = read_shard(shard_path(tmp.path(), Role::kEvaluation, 0));
  EXPECT_EQ(s.samples[0].image.rows(), 512u);
  EXPECT_EQ(s.samples[1].ground_truth.cols(), 512u);
}

}  // namespace
}  // namespace xaibench
