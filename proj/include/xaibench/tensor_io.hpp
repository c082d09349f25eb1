#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xaibench {

/// Row-major float32 tensor.
struct Tensor {
  std::vector<std::uint64_t> shape;
  std::vector<float> data;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// FBT1 layout, all integers little-endian:
//   bytes 0..3   "FBT1"
//   u32          dtype (1 = float32)
//   u32          rank
//   u64 x rank   dims
//   f32 x prod(dims), row-major
inline constexpr char kTensorMagic[4] = {'F', 'B', 'T', '1'};
inline constexpr std::uint32_t kDtypeFloat32 = 1;
inline constexpr std::uint32_t kMaxTensorRank = 8;

std::vector<std::byte> encode_tensor(const Tensor& t);
/// Throws Error with kBadMagic or kCorruptFile.
Tensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace xaibench
