#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xaibench/pipeline.hpp"
#include "xaibench/scoring.hpp"

namespace xaibench {

// CSV schemas (header row first, comma separated, floats as %.6g):
//   detail:    shard,sample,true,pred,method,m,A,P,R,FPR
//   aggregate: shard,sample,true,pred,method,A_avg,A_best,P_avg,P_best,R_avg,R_best
//   summary:   method,family,samples,<X>_<stat>,<X>_<stat>_std for X in A,P,R
//              and stat in avg,best
//   scatter:   method,variant,P_stat,R_stat,std_P,std_R
//   roc:       method,m,mean_FPR,mean_R
inline constexpr const char* kDetailHeader = "shard,sample,true,pred,method,m,A,P,R,FPR";
inline constexpr const char* kAggregateHeader = "shard,sample,true,pred,method,A_avg,A_best,P_avg,P_best,R_avg,R_best";
inline constexpr const char* kScatterHeader = "method,variant,P_stat,R_stat,std_P,std_R";
inline constexpr const char* kRocHeader = "method,m,mean_FPR,mean_R";

std::string format_sig6(double v);

/// Rounds every metric to the 6 significant digits the detail CSV stores,
/// so numbers derived in memory match those recomputed from the file.
std::vector<ScoreRecord> round_records(std::span<const ScoreRecord> records);

std::string detail_csv_name(FamilyKind family);
std::string aggregate_csv_name(FamilyKind family);
std::string summary_csv_name(FamilyKind family);
std::string roc_csv_name(FamilyKind family);

void write_detail_csv(std::span<const ScoreRecord> records, const std::filesystem::path& path);
/// Throws Error(kCorruptFile) on a bad header or malformed row.
std::vector<ScoreRecord> read_detail_csv(const std::filesystem::path& path);

void write_aggregate_csv(std::span<const SampleAggregate> rows, const std::filesystem::path& path);
void write_summary_csv(std::span<const MethodSummary> rows, FamilyKind family, const std::filesystem::path& path);

struct ScatterRow {
  std::string method;
  std::string variant;  // avg, best, clamped_best
  double p_stat = 0.0;
  double r_stat = 0.0;
  double std_p = 0.0;
  double std_r = 0.0;
};

/// Recall-vs-precision points: avg and best from the standard-family
/// records, clamped_best from the clamped-family records. Either input may
/// be empty.
std::vector<ScatterRow> scatter_rows(std::span<const ScoreRecord> standard, std::span<const ScoreRecord> clamped);

void write_scatter_csv(std::span<const ScatterRow> rows, const std::filesystem::path& path);

/// One ROC series per method found in `records`.
void write_roc_csv(std::span<const ScoreRecord> records, const ThresholdFamily& family,
                   const std::filesystem::path& path);

/// Diverging map: +1 red, 0 white, -1 blue.
Rgb diverging_color(double v);
Image colorize(const Grid<double>& values);
Image colorize_bands(const StratifiedMap& bands);

/// Gallery row: image | h0 | per-channel maps (3-channel input) or h |
/// adjusted h | S(h) at the first member | S(h) at the last member.
Image gallery_row(const Sample& sample, const CandidateHeatmap& h, const ScoringConfig& config);

/// Stacks rows vertically with a white gutter; narrower rows are padded.
Image stack_rows(std::span<const Image> rows, std::size_t gutter = 4);

}  // namespace xaibench
