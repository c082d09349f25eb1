#include "xaibench/synthgen.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "xaibench/error.hpp"
#include "xaibench/random.hpp"
#include "xaibench/raster.hpp"

namespace xaibench {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) invalid("bad " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

MockMethod MockMethod::parse(std::string_view spec) {
  if (spec.starts_with("mock:")) spec.remove_prefix(5);
  auto parts = split(spec, ':');
  MockMethod m;
  if (!parts.empty() && parts.back() == "rgb") {
    m.three_channel = true;
    parts.pop_back();
  }
  if (parts.empty() || parts.front().empty()) invalid("empty mock method");
  const auto name = parts.front();
  const std::size_t args = parts.size() - 1;
  auto expect_args = [&](std::size_t max) {
    if (args > max) invalid("too many parameters for mock '" + std::string(name) + "'");
  };

  if (name == "perfect") {
    m.kind = MockKind::kPerfect;
    expect_args(0);
  } else if (name == "dropout") {
    m.kind = MockKind::kDropout;
    expect_args(1);
    if (args >= 1) m.probability = parse_number<double>(parts[1], "dropout probability");
  } else if (name == "edge_only") {
    m.kind = MockKind::kEdgeOnly;
    expect_args(0);
  } else if (name == "lattice") {
    m.kind = MockKind::kLattice;
    expect_args(2);
    if (args >= 1) m.spacing = parse_number<int>(parts[1], "lattice spacing");
    if (args >= 2) m.amplitude = parse_number<double>(parts[2], "lattice amplitude");
  } else if (name == "sign_flipped") {
    m.kind = MockKind::kSignFlipped;
    expect_args(0);
  } else if (name == "blurred") {
    m.kind = MockKind::kBlurred;
    expect_args(1);
    if (args >= 1) m.radius = parse_number<int>(parts[1], "blur radius");
  } else if (name == "zero") {
    m.kind = MockKind::kZero;
    expect_args(0);
  } else {
    invalid("unknown mock method '" + std::string(name) + "'");
  }
  m.validate();
  return m;
}

std::string MockMethod::tag() const {
  std::string t = "mock:";
  switch (kind) {
    case MockKind::kPerfect: t += "perfect"; break;
    case MockKind::kDropout: t += "dropout:" + format_number(probability); break;
    case MockKind::kEdgeOnly: t += "edge_only"; break;
    case MockKind::kLattice: t += "lattice:" + std::to_string(spacing) + ":" + format_number(amplitude); break;
    case MockKind::kSignFlipped: t += "sign_flipped"; break;
    case MockKind::kBlurred: t += "blurred:" + std::to_string(radius); break;
    case MockKind::kZero: t += "zero"; break;
  }
  if (three_channel) t += ":rgb";
  return t;
}

void MockMethod::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) invalid("dropout probability must lie in [0, 1]");
  if (spacing < 2) invalid("lattice spacing must be at least 2 px");
  if (!std::isfinite(amplitude)) invalid("lattice amplitude must be finite");
  if (radius < 0) invalid("blur radius must be non-negative");
}

CandidateHeatmap mock_heatmap(const MockMethod& method, const Sample& sample, std::uint64_t seed) {
  method.validate();
  const GroundTruthHeatmap& h0 = sample.ground_truth;
  const std::size_t rows = h0.rows();
  const std::size_t cols = h0.cols();
  Grid<float> plane = h0;

  switch (method.kind) {
    case MockKind::kPerfect: break;
    case MockKind::kDropout: {
      Rng rng(seed);
      std::bernoulli_distribution drop(method.probability);
      for (float& v : plane.values()) {
        if (v != 0.0f && drop(rng)) v = 0.0f;
      }
      break;
    }
    case MockKind::kEdgeOnly: {
      Mask support(rows, cols, 0);
      for (std::size_t i = 0; i < h0.size(); ++i) support[i] = static_cast<std::uint8_t>(h0[i] != 0.0f);
      const Mask edge = inner_boundary(support);
      for (std::size_t i = 0; i < plane.size(); ++i) {
        if (!edge[i]) plane[i] = 0.0f;
      }
      break;
    }
    case MockKind::kLattice: {
      const auto step = static_cast<std::size_t>(method.spacing);
      for (std::size_t r = 0; r < rows; r += step) {
        for (std::size_t c = 0; c < cols; c += step) {
          if (h0(r, c) == 0.0f) plane(r, c) = static_cast<float>(method.amplitude);
        }
      }
      break;
    }
    case MockKind::kSignFlipped: {
      for (float& v : plane.values()) {
        if (std::abs(v - kDiscriminativeValue) < 1e-6f) v = -v;
      }
      break;
    }
    case MockKind::kBlurred: {
      const long radius = method.radius;
      const long nr = static_cast<long>(rows);
      const long nc = static_cast<long>(cols);
      for (long r = 0; r < nr; ++r) {
        for (long c = 0; c < nc; ++c) {
          double sum = 0.0;
          long n = 0;
          for (long rr = std::max(0L, r - radius); rr <= std::min(nr - 1, r + radius); ++rr) {
            for (long cc = std::max(0L, c - radius); cc <= std::min(nc - 1, c + radius); ++cc) {
              sum += h0(rr, cc);
              ++n;
            }
          }
          plane(r, c) = static_cast<float>(sum / static_cast<double>(n));
        }
      }
      break;
    }
    case MockKind::kZero:
      std::fill(plane.values().begin(), plane.values().end(), 0.0f);
      break;
  }

  if (!method.three_channel) return CandidateHeatmap::from_plane(plane);
  CandidateHeatmap out(3, rows, cols);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    std::copy(plane.values().begin(), plane.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(ch * plane.size()));
  }
  return out;
}

CandidateHeatmap abs_transform(CandidateHeatmap h) {
  for (float& v : h.values()) v = std::abs(v);
  return h;
}

}  // namespace xaibench
