#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "xaibench/cellgen.hpp"
#include "xaibench/heatmap.hpp"

namespace xaibench {

enum class MockKind { kPerfect, kDropout, kEdgeOnly, kLattice, kSignFlipped, kBlurred, kZero };

/// Synthetic explanation with a controlled pathology, derived from a
/// sample's ground truth.
struct MockMethod {
  MockKind kind = MockKind::kPerfect;
  double probability = 0.5;  // dropout
  int spacing = 16;          // lattice
  double amplitude = 0.5;    // lattice
  int radius = 1;            // blurred
  bool three_channel = false;

  /// Parses "perfect", "dropout:0.3", "edge_only", "lattice:16:0.5",
  /// "sign_flipped", "blurred:2", "zero", optionally prefixed with "mock:"
  /// and suffixed with ":rgb" for 3-channel output. Omitted parameters take
  /// the defaults above.
  static MockMethod parse(std::string_view spec);

  /// Canonical tag, e.g. "mock:dropout:0.5".
  std::string tag() const;

  /// Throws Error(kInvalidArgument) unless p in [0, 1], spacing >= 2 and
  /// radius >= 0.
  void validate() const;
};

/// perfect: h0.  dropout(p): each non-zero pixel zeroed with probability p.
/// edge_only: h0 on the boundary of its non-zero support.  lattice: h0 plus
/// spikes of `amplitude` on a `spacing` grid wherever h0 is zero.
/// sign_flipped: the 0.9 region negated.  blurred: box mean of radius
/// `radius`.  zero: all zeros.
CandidateHeatmap mock_heatmap(const MockMethod& method, const Sample& sample, std::uint64_t seed);

/// Elementwise |h|.
CandidateHeatmap abs_transform(CandidateHeatmap h);

}  // namespace xaibench
