#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xaibench {

/// Dense row-major 2D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const auto& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// std::vector<bool> is avoided so masks expose contiguous storage.
using Mask = Grid<std::uint8_t>;

using Rgb = std::array<float, 3>;

/// H x W x 3 image, channel-interleaved, values nominally in [0, 1].
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols * 3, 0.0f) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  float& at(std::size_t r, std::size_t c, std::size_t ch) { return data_[(r * cols_ + c) * 3 + ch]; }
  float at(std::size_t r, std::size_t c, std::size_t ch) const { return data_[(r * cols_ + c) * 3 + ch]; }

  void set(std::size_t r, std::size_t c, const Rgb& rgb) {
    float* p = &data_[(r * cols_ + c) * 3];
    p[0] = rgb[0];
    p[1] = rgb[1];
    p[2] = rgb[2];
  }
  Rgb get(std::size_t r, std::size_t c) const {
    const float* p = &data_[(r * cols_ + c) * 3];
    return {p[0], p[1], p[2]};
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  void clip01() {
    for (auto& v : data_) v = std::clamp(v, 0.0f, 1.0f);
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

inline std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(std::count_if(m.values().begin(), m.values().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

}  // namespace xaibench
