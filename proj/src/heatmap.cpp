#include "xaibench/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xaibench/error.hpp"

namespace xaibench {

CandidateHeatmap CandidateHeatmap::from_plane(const Grid<float>& plane) {
  CandidateHeatmap h(1, plane.rows(), plane.cols());
  std::copy(plane.values().begin(), plane.values().end(), h.values_.begin());
  return h;
}

CandidateHeatmap CandidateHeatmap::from_tensor(const Tensor& t) {
  std::size_t channels = 1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (t.shape.size() == 2) {
    rows = t.shape[0];
    cols = t.shape[1];
  } else if (t.shape.size() == 3) {
    channels = t.shape[0];
    rows = t.shape[1];
    cols = t.shape[2];
  } else {
    throw Error(ErrorKind::kDimensionMismatch,
                "heatmap tensor must have rank 2 or 3, got rank " + std::to_string(t.shape.size()));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::kDimensionMismatch, "heatmap must have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (t.data.size() != channels * rows * cols) throw Error(ErrorKind::kDimensionMismatch, "heatmap tensor size mismatch");
  CandidateHeatmap h(channels, rows, cols);
  h.values_ = t.data;
  return h;
}

Tensor CandidateHeatmap::to_tensor() const {
  return Tensor{{channels_, rows_, cols_}, values_};
}

Grid<float> CandidateHeatmap::plane(std::size_t ch) const {
  Grid<float> g(rows_, cols_);
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(ch * plane_size());
  std::copy(begin, begin + static_cast<std::ptrdiff_t>(plane_size()), g.values().begin());
  return g;
}

bool CandidateHeatmap::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace xaibench
