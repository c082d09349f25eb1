#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xaibench/cellgen.hpp"
#include "xaibench/heatmap.hpp"

namespace xaibench {

/// Smoothing term in the precision, recall and FPR denominators.
inline constexpr double kScoreEpsilon = 1e-6;

/// Symmetric threshold vector [-t2, -t1, t1, t2] with 0 < t1 < t2 <= 1.
class ThresholdVector {
 public:
  /// Throws Error(kInvalidArgument) unless 0 < inner < outer <= 1.
  ThresholdVector(double inner, double outer);

  double inner() const { return inner_; }
  double outer() const { return outer_; }
  std::array<double, 4> components() const { return {-outer_, -inner_, inner_, outer_}; }

 private:
  double inner_;
  double outer_;
};

enum class FamilyKind { kStandard, kClamped };

std::string_view family_name(FamilyKind kind);
FamilyKind family_from_name(std::string_view name);

/// Soft-threshold family t_m = [-outer + m d, -inner + m d, inner - m d,
/// outer - m d] for m = 0..n_soft. Components are held as integers in units
/// of 1e-4 so every member is the correctly rounded decimal value.
class ThresholdFamily {
 public:
  static constexpr std::int64_t kUnitsPerOne = 10000;

  /// inner 0.3, outer 0.5, d = 0.005, n_soft = 55 (56 members).
  static ThresholdFamily standard();
  /// inner 0.5, outer 0.9, d = 0.01, n_soft = 40 (41 members).
  static ThresholdFamily clamped();
  static ThresholdFamily of(FamilyKind kind);
  /// Every member must satisfy the ThresholdVector invariant.
  static ThresholdFamily custom(FamilyKind kind, std::int64_t inner_units, std::int64_t outer_units,
                                std::int64_t step_units, std::size_t n_soft);

  FamilyKind kind() const { return kind_; }
  std::size_t n_soft() const { return n_soft_; }
  std::size_t size() const { return n_soft_ + 1; }
  double step() const { return static_cast<double>(step_) / kUnitsPerOne; }
  ThresholdVector member(std::size_t m) const;

 private:
  ThresholdFamily(FamilyKind kind, std::int64_t inner, std::int64_t outer, std::int64_t step, std::size_t n_soft);

  FamilyKind kind_;
  std::int64_t inner_;
  std::int64_t outer_;
  std::int64_t step_;
  std::size_t n_soft_;
};

/// Saturation bounds [lo, hi] with lo < 0 < hi.
struct ClampBounds {
  double lo = -0.1;
  double hi = 0.1;
};

/// Normalize by the global max |h|, optionally clamp, sum over channels and
/// renormalize to max |h| = 1. All-zero input yields all-zero output.
/// Throws Error(kNonFinite) on NaN/inf input.
AdjustedHeatmap channel_adjust(const CandidateHeatmap& h, std::optional<ClampBounds> clamp = std::nullopt);

/// Five-band stratification:  2 if h > t2;  1 if t1 < h <= t2;  0 if
/// -t1 < h <= t1;  -1 if -t2 < h <= -t1;  -2 if h <= -t2.
/// Throws Error(kInvalidArgument) for values outside [-1, 1].
StratifiedMap stratify(const AdjustedHeatmap& h, const ThresholdVector& t);

/// Fixed mapping 0.9 -> 2, 0.4 -> 1, 0 -> 0 (and the negatives likewise).
StratifiedMap stratify_ground_truth(const GroundTruthHeatmap& h0);

enum class CountingMode {
  // A mis-banded non-zero prediction on a non-zero truth is FP; a zero
  // prediction there is FN only. Every pixel lands in exactly one count.
  kPartition,
  // Counts FP for every non-zero truth pixel with s != s0, including s = 0,
  // so such pixels are counted as both FP and FN.
  kLiteral,
};

struct BandCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t total = 0;

  friend bool operator==(const BandCounts&, const BandCounts&) = default;
};

BandCounts band_counts(const StratifiedMap& s, const StratifiedMap& s0, CountingMode mode = CountingMode::kPartition);

struct Scores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
};

/// A = (TP + TN) / total (exact band agreement), P = TP/(TP+FP+eps),
/// R = TP/(TP+FN+eps), FPR = FP/(FP+TN+eps).
Scores scores(const BandCounts& counts);

struct SweepPoint {
  std::size_t m = 0;
  BandCounts counts;
  Scores scores;
};

/// Scores an adjusted heatmap against h0 at every member of the family.
std::vector<SweepPoint> soft_sweep(const AdjustedHeatmap& h, const GroundTruthHeatmap& h0, const ThresholdFamily& family,
                                   CountingMode mode = CountingMode::kPartition);

struct ScoreRecord {
  std::size_t shard = 0;
  std::size_t sample = 0;
  int true_class = 0;
  int predicted_class = 0;
  std::string method;
  std::size_t m = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
};

struct AvgBest {
  double avg = 0.0;
  double best = 0.0;
};

struct SampleAggregate {
  std::size_t shard = 0;
  std::size_t sample = 0;
  int true_class = 0;
  int predicted_class = 0;
  std::string method;
  std::size_t members = 0;
  AvgBest accuracy;
  AvgBest precision;
  AvgBest recall;
};

/// X_avg is the arithmetic mean over the records (divided by the actual
/// member count), X_best the maximum. All records must come from one sample
/// and method. Throws Error(kInvalidArgument) on empty or mixed input.
SampleAggregate aggregate(std::span<const ScoreRecord> records);

/// Groups records by (method, shard, sample) and aggregates each group.
/// Output is ordered by method, shard, sample.
std::vector<SampleAggregate> aggregate_all(std::span<const ScoreRecord> records);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct MethodSummary {
  std::string method;
  std::size_t samples = 0;
  MeanStd accuracy_avg, accuracy_best;
  MeanStd precision_avg, precision_best;
  MeanStd recall_avg, recall_best;
};

/// Per-method means and standard deviations over samples, ordered by method.
std::vector<MethodSummary> summarize(std::span<const SampleAggregate> aggregates);

struct RocPoint {
  std::size_t m = 0;
  double mean_fpr = 0.0;
  double mean_recall = 0.0;
};

/// One (mean FPR, mean R) point per family member for a single method.
/// Throws Error(kIncomplete) unless every sample has a record for every m.
std::vector<RocPoint> roc_points(std::span<const ScoreRecord> records, const ThresholdFamily& family);

/// Pairwise (cascade) summation in index order, reproducible for a given
/// input sequence.
double pairwise_sum(std::span<const double> values);

MeanStd mean_std(std::span<const double> values);

}  // namespace xaibench
