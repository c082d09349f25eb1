#include "xaibench/raster.hpp"

#include <cmath>
#include <vector>

namespace xaibench {

Grid<int> label_components(const Mask& mask, Connectivity conn) {
  const auto rows = static_cast<long>(mask.rows());
  const auto cols = static_cast<long>(mask.cols());
  Grid<int> labels(mask.rows(), mask.cols(), 0);
  std::vector<std::pair<long, long>> stack;
  int next = 0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!mask(r, c) || labels(r, c)) continue;
      ++next;
      labels(r, c) = next;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        auto [pr, pc] = stack.back();
        stack.pop_back();
        for (long dr = -1; dr <= 1; ++dr) {
          for (long dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (conn == Connectivity::kFour && dr != 0 && dc != 0) continue;
            const long nr = pr + dr;
            const long nc = pc + dc;
            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
            if (!mask(nr, nc) || labels(nr, nc)) continue;
            labels(nr, nc) = next;
            stack.emplace_back(nr, nc);
          }
        }
      }
    }
  }
  return labels;
}

std::size_t count_components(const Mask& mask, Connectivity conn) {
  const auto labels = label_components(mask, conn);
  int top = 0;
  for (int v : labels.values()) top = std::max(top, v);
  return static_cast<std::size_t>(top);
}

Mask rotate_mask(const Mask& mask, double angle, double cx, double cy) {
  Mask out(mask.rows(), mask.cols(), 0);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const auto rows = static_cast<long>(mask.rows());
  const auto cols = static_cast<long>(mask.cols());
  for (long r = 0; r < rows; ++r) {
    for (long col = 0; col < cols; ++col) {
      // Inverse map: rotate the destination point by -angle.
      const double dx = static_cast<double>(col) - cx;
      const double dy = static_cast<double>(r) - cy;
      const double sx = c * dx + s * dy + cx;
      const double sy = -s * dx + c * dy + cy;
      const long ic = std::lround(sx);
      const long ir = std::lround(sy);
      if (ir < 0 || ic < 0 || ir >= rows || ic >= cols) continue;
      out(r, col) = mask(ir, ic);
    }
  }
  return out;
}

Mask inner_boundary(const Mask& mask) {
  Mask out(mask.rows(), mask.cols(), 0);
  const auto rows = static_cast<long>(mask.rows());
  const auto cols = static_cast<long>(mask.cols());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!mask(r, c)) continue;
      const bool edge = r == 0 || c == 0 || r == rows - 1 || c == cols - 1 || !mask(r - 1, c) ||
                        !mask(r + 1, c) || !mask(r, c - 1) || !mask(r, c + 1);
      if (edge) out(r, c) = 1;
    }
  }
  return out;
}

}  // namespace xaibench
