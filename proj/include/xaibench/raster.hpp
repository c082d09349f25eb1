#pragma once

#include <cstddef>

#include "xaibench/grid.hpp"

namespace xaibench {

enum class Connectivity { kFour = 4, kEight = 8 };

/// Labels connected regions of set pixels. Labels start at 1; 0 is unset.
Grid<int> label_components(const Mask& mask, Connectivity conn = Connectivity::kEight);

std::size_t count_components(const Mask& mask, Connectivity conn = Connectivity::kEight);

/// Nearest-neighbour rotation of a mask by `angle` radians about (cx, cy),
/// where x runs along columns and y along rows.
Mask rotate_mask(const Mask& mask, double angle, double cx, double cy);

/// Set pixels having at least one 4-neighbour that is unset or off-image.
Mask inner_boundary(const Mask& mask);

}  // namespace xaibench
