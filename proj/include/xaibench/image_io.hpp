#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "xaibench/grid.hpp"

namespace xaibench {

// Binary PPM (P6, maxval 255). Values are clamped to [0, 1] and rounded to
// the nearest 8-bit level, so a round trip moves each value by <= 0.5/255.
std::vector<std::byte> encode_ppm(const Image& img);
Image decode_ppm(std::span<const std::byte> bytes);

void write_ppm(const Image& img, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

}  // namespace xaibench
