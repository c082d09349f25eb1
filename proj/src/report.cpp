#include "xaibench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "xaibench/error.hpp"
#include "xaibench/synthgen.hpp"

namespace xaibench {

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const fs::path& path, const char* header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << header << "\n";
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void check_method(const std::string& method) {
  if (method.find_first_of(",\"\n\r") != std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "method tag '" + method + "' cannot be stored in CSV");
  }
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T field(std::string_view text, const fs::path& path, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kCorruptFile,
                path.string() + ":" + std::to_string(line) + ": bad field '" + std::string(text) + "'");
  }
  return value;
}

std::map<std::string, std::vector<ScoreRecord>> by_method(std::span<const ScoreRecord> records) {
  std::map<std::string, std::vector<ScoreRecord>> out;
  for (const auto& r : records) out[r.method].push_back(r);
  return out;
}

void blit(Image& dst, const Image& src, std::size_t row0, std::size_t col0) {
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) dst.set(row0 + r, col0 + c, src.get(r, c));
  }
}

Grid<double> to_double(const Grid<float>& g) {
  Grid<double> out(g.rows(), g.cols());
  std::transform(g.values().begin(), g.values().end(), out.values().begin(), [](float v) { return double(v); });
  return out;
}

// Scales a raw plane by its max |value| for display.
Grid<double> normalized(const Grid<float>& g) {
  Grid<double> out = to_double(g);
  double peak = 0.0;
  for (double v : out.values()) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out.values()) v /= peak;
  }
  return out;
}

}  // namespace

std::string format_sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<ScoreRecord> round_records(std::span<const ScoreRecord> records) {
  auto round6 = [](double v) { return std::strtod(format_sig6(v).c_str(), nullptr); };
  std::vector<ScoreRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    r.accuracy = round6(r.accuracy);
    r.precision = round6(r.precision);
    r.recall = round6(r.recall);
    r.fpr = round6(r.fpr);
  }
  return out;
}

std::string detail_csv_name(FamilyKind family) { return "detail_" + std::string(family_name(family)) + ".csv"; }
std::string aggregate_csv_name(FamilyKind family) { return "aggregate_" + std::string(family_name(family)) + ".csv"; }
std::string summary_csv_name(FamilyKind family) { return "summary_" + std::string(family_name(family)) + ".csv"; }
std::string roc_csv_name(FamilyKind family) { return "roc_" + std::string(family_name(family)) + ".csv"; }

void write_detail_csv(std::span<const ScoreRecord> records, const fs::path& path) {
  auto out = open_csv(path, kDetailHeader);
  for (const auto& r : records) {
    check_method(r.method);
    out << r.shard << ',' << r.sample << ',' << r.true_class << ',' << r.predicted_class << ',' << r.method << ','
        << r.m << ',' << format_sig6(r.accuracy) << ',' << format_sig6(r.precision) << ',' << format_sig6(r.recall)
        << ',' << format_sig6(r.fpr) << '\n';
  }
  finish(out, path);
}

std::vector<ScoreRecord> read_detail_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kDetailHeader) {
    throw Error(ErrorKind::kCorruptFile, path.string() + ": missing or unexpected header");
  }
  std::vector<ScoreRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 10) {
      throw Error(ErrorKind::kCorruptFile, path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
    }
    ScoreRecord r;
    r.shard = field<std::size_t>(f[0], path, line_no);
    r.sample = field<std::size_t>(f[1], path, line_no);
    r.true_class = field<int>(f[2], path, line_no);
    r.predicted_class = field<int>(f[3], path, line_no);
    r.method = std::string(f[4]);
    r.m = field<std::size_t>(f[5], path, line_no);
    r.accuracy = field<double>(f[6], path, line_no);
    r.precision = field<double>(f[7], path, line_no);
    r.recall = field<double>(f[8], path, line_no);
    r.fpr = field<double>(f[9], path, line_no);
    out.push_back(std::move(r));
  }
  return out;
}

void write_aggregate_csv(std::span<const SampleAggregate> rows, const fs::path& path) {
  auto out = open_csv(path, kAggregateHeader);
  for (const auto& a : rows) {
    check_method(a.method);
    out << a.shard << ',' << a.sample << ',' << a.true_class << ',' << a.predicted_class << ',' << a.method << ','
        << format_sig6(a.accuracy.avg) << ',' << format_sig6(a.accuracy.best) << ',' << format_sig6(a.precision.avg)
        << ',' << format_sig6(a.precision.best) << ',' << format_sig6(a.recall.avg) << ','
        << format_sig6(a.recall.best) << '\n';
  }
  finish(out, path);
}

void write_summary_csv(std::span<const MethodSummary> rows, FamilyKind family, const fs::path& path) {
  auto out = open_csv(path,
                      "method,family,samples,A_avg,A_avg_std,A_best,A_best_std,P_avg,P_avg_std,P_best,P_best_std,"
                      "R_avg,R_avg_std,R_best,R_best_std");
  auto pair = [](const MeanStd& s) { return format_sig6(s.mean) + ',' + format_sig6(s.std); };
  for (const auto& s : rows) {
    check_method(s.method);
    out << s.method << ',' << family_name(family) << ',' << s.samples << ',' << pair(s.accuracy_avg) << ','
        << pair(s.accuracy_best) << ',' << pair(s.precision_avg) << ',' << pair(s.precision_best) << ','
        << pair(s.recall_avg) << ',' << pair(s.recall_best) << '\n';
  }
  finish(out, path);
}

std::vector<ScatterRow> scatter_rows(std::span<const ScoreRecord> standard, std::span<const ScoreRecord> clamped) {
  std::vector<ScatterRow> out;
  const auto std_summary = summarize(aggregate_all(standard));
  const auto clamped_summary = summarize(aggregate_all(clamped));
  for (const auto& s : std_summary) {
    out.push_back({s.method, "avg", s.precision_avg.mean, s.recall_avg.mean, s.precision_avg.std, s.recall_avg.std});
    out.push_back(
        {s.method, "best", s.precision_best.mean, s.recall_best.mean, s.precision_best.std, s.recall_best.std});
  }
  for (const auto& s : clamped_summary) {
    out.push_back({s.method, "clamped_best", s.precision_best.mean, s.recall_best.mean, s.precision_best.std,
                   s.recall_best.std});
  }
  return out;
}

void write_scatter_csv(std::span<const ScatterRow> rows, const fs::path& path) {
  auto out = open_csv(path, kScatterHeader);
  for (const auto& r : rows) {
    check_method(r.method);
    out << r.method << ',' << r.variant << ',' << format_sig6(r.p_stat) << ',' << format_sig6(r.r_stat) << ','
        << format_sig6(r.std_p) << ',' << format_sig6(r.std_r) << '\n';
  }
  finish(out, path);
}

void write_roc_csv(std::span<const ScoreRecord> records, const ThresholdFamily& family, const fs::path& path) {
  auto out = open_csv(path, kRocHeader);
  for (const auto& [method, group] : by_method(records)) {
    check_method(method);
    for (const auto& p : roc_points(group, family)) {
      out << method << ',' << p.m << ',' << format_sig6(p.mean_fpr) << ',' << format_sig6(p.mean_recall) << '\n';
    }
  }
  finish(out, path);
}

Rgb diverging_color(double v) {
  const auto a = static_cast<float>(std::clamp(std::abs(v), 0.0, 1.0));
  if (v >= 0.0) return {1.0f, 1.0f - a, 1.0f - a};
  return {1.0f - a, 1.0f - a, 1.0f};
}

Image colorize(const Grid<double>& values) {
  Image img(values.rows(), values.cols());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) img.set(r, c, diverging_color(values(r, c)));
  }
  return img;
}

Image colorize_bands(const StratifiedMap& bands) {
  Grid<double> scaled(bands.rows(), bands.cols());
  for (std::size_t i = 0; i < bands.size(); ++i) scaled[i] = bands[i] / 2.0;
  return colorize(scaled);
}

Image gallery_row(const Sample& sample, const CandidateHeatmap& h, const ScoringConfig& config) {
  std::vector<Image> tiles;
  tiles.push_back(sample.image);
  tiles.push_back(colorize(to_double(sample.ground_truth)));
  const CandidateHeatmap input = config.abs_transform ? abs_transform(h) : h;
  for (std::size_t ch = 0; ch < input.channels(); ++ch) tiles.push_back(colorize(normalized(input.plane(ch))));
  const AdjustedHeatmap adjusted = channel_adjust(input, config.clamp);
  tiles.push_back(colorize(adjusted));
  const auto family = ThresholdFamily::of(config.family);
  tiles.push_back(colorize_bands(stratify(adjusted, family.member(0))));
  tiles.push_back(colorize_bands(stratify(adjusted, family.member(family.n_soft()))));

  constexpr std::size_t kGutter = 2;
  const std::size_t rows = sample.image.rows();
  std::size_t cols = 0;
  for (const auto& t : tiles) cols += t.cols() + kGutter;
  Image row(rows, cols - kGutter);
  for (auto& v : row.values()) v = 1.0f;
  std::size_t col = 0;
  for (const auto& t : tiles) {
    blit(row, t, 0, col);
    col += t.cols() + kGutter;
  }
  return row;
}

Image stack_rows(std::span<const Image> rows, std::size_t gutter) {
  if (rows.empty()) return {};
  std::size_t width = 0;
  std::size_t height = 0;
  for (const auto& r : rows) {
    width = std::max(width, r.cols());
    height += r.rows() + gutter;
  }
  Image out(height - gutter, width);
  for (auto& v : out.values()) v = 1.0f;
  std::size_t top = 0;
  for (const auto& r : rows) {
    blit(out, r, top, 0);
    top += r.rows() + gutter;
  }
  return out;
}

}  // namespace xaibench
