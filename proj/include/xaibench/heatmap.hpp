#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xaibench/grid.hpp"
#include "xaibench/tensor_io.hpp"

namespace xaibench {

/// Real-valued explanation to be scored, stored channel-major (C x H x W).
class CandidateHeatmap {
 public:
  CandidateHeatmap() = default;
  CandidateHeatmap(std::size_t channels, std::size_t rows, std::size_t cols, float fill = 0.0f)
      : channels_(channels), rows_(rows), cols_(cols), values_(channels * rows * cols, fill) {}

  /// Single-channel heatmap with the values of `plane`.
  static CandidateHeatmap from_plane(const Grid<float>& plane);
  /// Accepts rank 2 (H x W) or rank 3 (C x H x W) tensors with C in {1, 3}.
  static CandidateHeatmap from_tensor(const Tensor& t);

  Tensor to_tensor() const;

  std::size_t channels() const { return channels_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t plane_size() const { return rows_ * cols_; }

  float& at(std::size_t ch, std::size_t r, std::size_t c) { return values_[(ch * rows_ + r) * cols_ + c]; }
  float at(std::size_t ch, std::size_t r, std::size_t c) const { return values_[(ch * rows_ + r) * cols_ + c]; }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  /// Channel `ch` as a plane.
  Grid<float> plane(std::size_t ch) const;

  bool all_finite() const;

  friend bool operator==(const CandidateHeatmap&, const CandidateHeatmap&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// Single-channel heatmap after channel adjustment, values in [-1, 1].
using AdjustedHeatmap = Grid<double>;

/// Per-pixel bands in {-2, -1, 0, 1, 2}.
using StratifiedMap = Grid<std::int8_t>;

}  // namespace xaibench
