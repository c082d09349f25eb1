#include "xaibench/pipeline.hpp"

#include <functional>

#include "xaibench/error.hpp"
#include "xaibench/parallel.hpp"

namespace xaibench {

namespace {

// FNV-1a, for turning a method tag into a stream key.
std::uint64_t hash_tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string HeatmapSource::tag() const {
  if (mock) return mock->tag();
  if (archive) return archive->method;
  return "unknown";
}

std::uint64_t mock_seed(const Sample& sample, const MockMethod& method) {
  return derive_seed({sample.seed, hash_tag(method.tag())});
}

std::string method_label(const HeatmapSource& source, const ScoringConfig& config) {
  return config.abs_transform ? source.tag() + "+abs" : source.tag();
}

std::vector<SweepPoint> evaluate_heatmap(const CandidateHeatmap& h, const GroundTruthHeatmap& h0,
                                         const ScoringConfig& config) {
  const AdjustedHeatmap adjusted = config.abs_transform ? channel_adjust(abs_transform(h), config.clamp)
                                                        : channel_adjust(h, config.clamp);
  return soft_sweep(adjusted, h0, ThresholdFamily::of(config.family), config.mode);
}

ShardScores score_shard(const Shard& shard, const HeatmapSource& source, const ScoringConfig& config) {
  if (!source.mock && !source.archive) throw Error(ErrorKind::kInvalidArgument, "heatmap source is empty");
  if (shard.samples.size() != shard.manifest.size()) {
    throw Error(ErrorKind::kIncomplete, "shard " + std::to_string(shard.index) + " has no loaded samples");
  }
  const std::string label = method_label(source, config);
  const std::size_t n = shard.samples.size();
  std::vector<std::vector<ScoreRecord>> per_sample(n);
  std::vector<std::string> problems(n);

  parallel_for(n, config.threads, [&](std::size_t i) {
    const Sample& sample = shard.samples[i];
    const int true_class = class_id(sample.label);
    int predicted = true_class;
    CandidateHeatmap heatmap;
    if (source.mock) {
      heatmap = mock_heatmap(*source.mock, sample, mock_seed(sample, *source.mock));
    } else {
      const auto found = source.archive->entries.find({shard.index, i});
      if (found == source.archive->entries.end()) {
        problems[i] = "shard " + std::to_string(shard.index) + " sample " + std::to_string(i) + ": no heatmap";
        return;
      }
      heatmap = found->second.heatmap;
      predicted = class_id(found->second.predicted);
    }
    std::vector<SweepPoint> sweep;
    try {
      sweep = evaluate_heatmap(heatmap, sample.ground_truth, config);
    } catch (const Error& e) {
      problems[i] = "shard " + std::to_string(shard.index) + " sample " + std::to_string(i) + ": " + e.what();
      return;
    }
    auto& out = per_sample[i];
    out.reserve(sweep.size());
    for (const auto& p : sweep) {
      out.push_back(ScoreRecord{shard.index, i, true_class, predicted, label, p.m, p.scores.accuracy,
                                p.scores.precision, p.scores.recall, p.scores.fpr});
    }
  });

  ShardScores result;
  for (std::size_t i = 0; i < n; ++i) {
    if (!problems[i].empty()) result.missing.push_back(std::move(problems[i]));
    for (auto& r : per_sample[i]) result.records.push_back(std::move(r));
  }
  return result;
}

}  // namespace xaibench
