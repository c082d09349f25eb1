#include "xaibench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "xaibench/error.hpp"

namespace xaibench {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); }

double ratio(std::uint64_t num, std::uint64_t den_without_eps) {
  return static_cast<double>(num) / (static_cast<double>(den_without_eps) + kScoreEpsilon);
}

std::int8_t ground_truth_band(float v) {
  constexpr double kTol = 1e-6;
  const double a = std::abs(static_cast<double>(v));
  std::int8_t band = 0;
  if (a <= kTol) {
    return 0;
  } else if (std::abs(a - 0.4) <= kTol) {
    band = 1;
  } else if (std::abs(a - 0.9) <= kTol) {
    band = 2;
  } else {
    std::ostringstream os;
    os << "unexpected ground-truth value " << v << " (expected 0, +-0.4 or +-0.9)";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return v < 0 ? static_cast<std::int8_t>(-band) : band;
}

}  // namespace

ThresholdVector::ThresholdVector(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner > 0.0 && inner < outer && outer <= 1.0)) {
    std::ostringstream os;
    os << "threshold vector requires 0 < t1 < t2 <= 1, got t1=" << inner << " t2=" << outer;
    invalid(os.str());
  }
}

std::string_view family_name(FamilyKind kind) {
  return kind == FamilyKind::kStandard ? "standard" : "clamped";
}

FamilyKind family_from_name(std::string_view name) {
  if (name == "standard") return FamilyKind::kStandard;
  if (name == "clamped") return FamilyKind::kClamped;
  invalid("unknown threshold family '" + std::string(name) + "'");
}

ThresholdFamily::ThresholdFamily(FamilyKind kind, std::int64_t inner, std::int64_t outer, std::int64_t step,
                                 std::size_t n_soft)
    : kind_(kind), inner_(inner), outer_(outer), step_(step), n_soft_(n_soft) {}

ThresholdFamily ThresholdFamily::standard() { return ThresholdFamily(FamilyKind::kStandard, 3000, 5000, 50, 55); }

ThresholdFamily ThresholdFamily::clamped() { return ThresholdFamily(FamilyKind::kClamped, 5000, 9000, 100, 40); }

ThresholdFamily ThresholdFamily::of(FamilyKind kind) {
  return kind == FamilyKind::kStandard ? standard() : clamped();
}

ThresholdFamily ThresholdFamily::custom(FamilyKind kind, std::int64_t inner_units, std::int64_t outer_units,
                                        std::int64_t step_units, std::size_t n_soft) {
  if (step_units < 0) invalid("threshold step must be non-negative");
  ThresholdFamily family(kind, inner_units, outer_units, step_units, n_soft);
  // Both ends of the sweep must be valid; the members in between then are too.
  (void)family.member(0);
  (void)family.member(n_soft);
  return family;
}

ThresholdVector ThresholdFamily::member(std::size_t m) const {
  if (m > n_soft_) invalid("threshold member " + std::to_string(m) + " beyond n_soft " + std::to_string(n_soft_));
  const auto shift = static_cast<std::int64_t>(m) * step_;
  return ThresholdVector(static_cast<double>(inner_ - shift) / kUnitsPerOne,
                         static_cast<double>(outer_ - shift) / kUnitsPerOne);
}

AdjustedHeatmap channel_adjust(const CandidateHeatmap& h, std::optional<ClampBounds> clamp) {
  if (h.channels() == 0) invalid("heatmap has no channels");
  if (!h.all_finite()) throw Error(ErrorKind::kNonFinite, "heatmap contains NaN or infinite values");
  if (clamp && !(clamp->lo < 0.0 && 0.0 < clamp->hi)) invalid("clamp bounds must satisfy c1 < 0 < c2");

  AdjustedHeatmap out(h.rows(), h.cols(), 0.0);
  double peak = 0.0;
  for (float v : h.values()) peak = std::max(peak, std::abs(static_cast<double>(v)));
  if (peak == 0.0) return out;

  const std::size_t plane = h.plane_size();
  const auto values = h.values();
  for (std::size_t ch = 0; ch < h.channels(); ++ch) {
    for (std::size_t i = 0; i < plane; ++i) {
      double v = static_cast<double>(values[ch * plane + i]) / peak;
      if (clamp) v = std::clamp(v, clamp->lo, clamp->hi);
      out[i] += v;
    }
  }

  double summed_peak = 0.0;
  for (double v : out.values()) summed_peak = std::max(summed_peak, std::abs(v));
  if (summed_peak == 0.0) {
    std::fill(out.values().begin(), out.values().end(), 0.0);
    return out;
  }
  for (double& v : out.values()) v /= summed_peak;
  return out;
}

StratifiedMap stratify(const AdjustedHeatmap& h, const ThresholdVector& t) {
  StratifiedMap out(h.rows(), h.cols(), 0);
  const double t1 = t.inner();
  const double t2 = t.outer();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double v = h[i];
    if (!(v >= -1.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "heatmap value " << v << " outside [-1, 1]; channel-adjust it first";
      invalid(os.str());
    }
    std::int8_t band;
    if (v > t2) {
      band = 2;
    } else if (v > t1) {
      band = 1;
    } else if (v > -t1) {
      band = 0;
    } else if (v > -t2) {
      band = -1;
    } else {
      band = -2;
    }
    out[i] = band;
  }
  return out;
}

StratifiedMap stratify_ground_truth(const GroundTruthHeatmap& h0) {
  StratifiedMap out(h0.rows(), h0.cols(), 0);
  for (std::size_t i = 0; i < h0.size(); ++i) out[i] = ground_truth_band(h0[i]);
  return out;
}

BandCounts band_counts(const StratifiedMap& s, const StratifiedMap& s0, CountingMode mode) {
  if (!s.same_shape(s0)) {
    std::ostringstream os;
    os << "stratified maps differ in shape: " << s.rows() << "x" << s.cols() << " vs " << s0.rows() << "x" << s0.cols();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  BandCounts c;
  c.total = s.size();
  const bool literal = mode == CountingMode::kLiteral;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto pred = s[i];
    const auto truth = s0[i];
    if (truth == 0) {
      if (pred == 0) {
        ++c.tn;
      } else {
        ++c.fp;
      }
    } else if (pred == truth) {
      ++c.tp;
    } else if (pred == 0) {
      ++c.fn;
      if (literal) ++c.fp;
    } else {
      ++c.fp;
    }
  }
  return c;
}

Scores scores(const BandCounts& c) {
  Scores s;
  s.accuracy = c.total == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total);
  s.precision = ratio(c.tp, c.tp + c.fp);
  s.recall = ratio(c.tp, c.tp + c.fn);
  s.fpr = ratio(c.fp, c.fp + c.tn);
  return s;
}

std::vector<SweepPoint> soft_sweep(const AdjustedHeatmap& h, const GroundTruthHeatmap& h0, const ThresholdFamily& family,
                                   CountingMode mode) {
  if (!h.same_shape(h0)) {
    std::ostringstream os;
    os << "heatmap is " << h.rows() << "x" << h.cols() << ", ground truth is " << h0.rows() << "x" << h0.cols();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  const StratifiedMap truth = stratify_ground_truth(h0);
  std::vector<SweepPoint> out;
  out.reserve(family.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    SweepPoint p;
    p.m = m;
    p.counts = band_counts(stratify(h, family.member(m)), truth, mode);
    p.scores = scores(p.counts);
    out.push_back(p);
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
  return {mean, std::sqrt(pairwise_sum(sq) / n)};
}

SampleAggregate aggregate(std::span<const ScoreRecord> records) {
  if (records.empty()) invalid("cannot aggregate an empty record set");
  const auto& first = records.front();
  SampleAggregate out;
  out.shard = first.shard;
  out.sample = first.sample;
  out.true_class = first.true_class;
  out.predicted_class = first.predicted_class;
  out.method = first.method;
  out.members = records.size();

  std::vector<double> a, p, r;
  a.reserve(records.size());
  p.reserve(records.size());
  r.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.shard != first.shard || rec.sample != first.sample || rec.method != first.method) {
      invalid("aggregate() expects the records of one sample and method");
    }
    a.push_back(rec.accuracy);
    p.push_back(rec.precision);
    r.push_back(rec.recall);
  }
  auto avg_best = [](const std::vector<double>& xs) {
    const double best = *std::max_element(xs.begin(), xs.end());
    // The mean cannot exceed the maximum; clamp away summation rounding.
    const double avg = std::min(best, pairwise_sum(xs) / static_cast<double>(xs.size()));
    return AvgBest{avg, best};
  };
  out.accuracy = avg_best(a);
  out.precision = avg_best(p);
  out.recall = avg_best(r);
  return out;
}

std::vector<SampleAggregate> aggregate_all(std::span<const ScoreRecord> records) {
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::vector<ScoreRecord>> groups;
  for (const auto& rec : records) groups[{rec.method, rec.shard, rec.sample}].push_back(rec);
  std::vector<SampleAggregate> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), [](const ScoreRecord& x, const ScoreRecord& y) { return x.m < y.m; });
    out.push_back(aggregate(group));
  }
  return out;
}

std::vector<MethodSummary> summarize(std::span<const SampleAggregate> aggregates) {
  std::map<std::string, std::vector<const SampleAggregate*>> by_method;
  for (const auto& agg : aggregates) by_method[agg.method].push_back(&agg);
  std::vector<MethodSummary> out;
  for (const auto& [method, group] : by_method) {
    auto stat = [&group](auto field) {
      std::vector<double> xs;
      xs.reserve(group.size());
      for (const auto* agg : group) xs.push_back(field(*agg));
      return mean_std(xs);
    };
    MethodSummary s;
    s.method = method;
    s.samples = group.size();
    s.accuracy_avg = stat([](const SampleAggregate& g) { return g.accuracy.avg; });
    s.accuracy_best = stat([](const SampleAggregate& g) { return g.accuracy.best; });
    s.precision_avg = stat([](const SampleAggregate& g) { return g.precision.avg; });
    s.precision_best = stat([](const SampleAggregate& g) { return g.precision.best; });
    s.recall_avg = stat([](const SampleAggregate& g) { return g.recall.avg; });
    s.recall_best = stat([](const SampleAggregate& g) { return g.recall.best; });
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RocPoint> roc_points(std::span<const ScoreRecord> records, const ThresholdFamily& family) {
  if (records.empty()) throw Error(ErrorKind::kIncomplete, "no score records for the ROC");
  const std::string& method = records.front().method;
  // (shard, sample) -> per-member slot
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const ScoreRecord*>> table;
  for (const auto& rec : records) {
    if (rec.method != method) invalid("roc_points() expects records of a single method");
    if (rec.m >= family.size()) {
      throw Error(ErrorKind::kIncomplete, "record threshold index " + std::to_string(rec.m) + " outside the family");
    }
    auto& slots = table[{rec.shard, rec.sample}];
    slots.resize(family.size(), nullptr);
    slots[rec.m] = &rec;
  }
  std::vector<RocPoint> out;
  out.reserve(family.size());
  std::vector<double> fpr;
  std::vector<double> recall;
  for (std::size_t m = 0; m < family.size(); ++m) {
    fpr.clear();
    recall.clear();
    for (const auto& [key, slots] : table) {
      if (!slots[m]) {
        throw Error(ErrorKind::kIncomplete, "shard " + std::to_string(key.first) + " sample " +
                                                std::to_string(key.second) + " has no record for m=" +
                                                std::to_string(m));
      }
      fpr.push_back(slots[m]->fpr);
      recall.push_back(slots[m]->recall);
    }
    const double n = static_cast<double>(table.size());
    out.push_back({m, pairwise_sum(fpr) / n, pairwise_sum(recall) / n});
  }
  return out;
}

}  // namespace xaibench
