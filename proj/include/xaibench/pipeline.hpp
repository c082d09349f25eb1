#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xaibench/dataset.hpp"
#include "xaibench/scoring.hpp"
#include "xaibench/synthgen.hpp"

namespace xaibench {

struct ScoringConfig {
  FamilyKind family = FamilyKind::kStandard;
  std::optional<ClampBounds> clamp;
  bool abs_transform = false;
  CountingMode mode = CountingMode::kPartition;
  unsigned threads = 1;
};

/// Where candidate heatmaps come from: a mock method or an imported archive.
struct HeatmapSource {
  std::optional<MockMethod> mock;
  const HeatmapArchive* archive = nullptr;

  static HeatmapSource from_mock(MockMethod m) { return {std::move(m), nullptr}; }
  static HeatmapSource from_archive(const HeatmapArchive& a) { return {std::nullopt, &a}; }

  std::string tag() const;
};

/// Seed for a mock heatmap of one sample; independent of the sample's own
/// generation stream.
std::uint64_t mock_seed(const Sample& sample, const MockMethod& method);

/// Tag written to score records: the source tag, plus "+abs" when the
/// absolute-value transform is applied.
std::string method_label(const HeatmapSource& source, const ScoringConfig& config);

/// Runs abs (optional), channel adjustment (with optional clamping) and the
/// soft sweep for one heatmap.
std::vector<SweepPoint> evaluate_heatmap(const CandidateHeatmap& h, const GroundTruthHeatmap& h0,
                                         const ScoringConfig& config);

struct ShardScores {
  std::vector<ScoreRecord> records;  // ordered by sample, then m
  std::vector<std::string> missing;  // samples without a usable heatmap
};

ShardScores score_shard(const Shard& shard, const HeatmapSource& source, const ScoringConfig& config);

}  // namespace xaibench
