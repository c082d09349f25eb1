#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "xaibench/grid.hpp"
#include "xaibench/heatmap.hpp"
#include "xaibench/scoring.hpp"

namespace xaibench::testing {

// Counts written straight from the per-pixel definitions, one branch per
// case, with no shared code with band_counts.
inline BandCounts naive_counts(const StratifiedMap& s, const StratifiedMap& s0,
                               CountingMode mode = CountingMode::kPartition) {
  BandCounts c;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t col = 0; col < s.cols(); ++col) {
      const int a = s(r, col);
      const int b = s0(r, col);
      c.total += 1;
      if (b != 0 && a == b) c.tp += 1;
      if (b != 0 && a == 0) c.fn += 1;
      if (b == 0 && a != 0) c.fp += 1;
      if (b != 0 && a != 0 && a != b) c.fp += 1;
      if (b == 0 && a == 0) c.tn += 1;
      if (mode == CountingMode::kLiteral && b != 0 && a != b) {
        // "h0 != 0 and h != h0" also covers the a == 0 pixels.
        if (a == 0) c.fp += 1;
      }
    }
  }
  return c;
}

inline StratifiedMap random_bands(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> band(-2, 2);
  StratifiedMap s(rows, cols, 0);
  for (auto& v : s.values()) v = static_cast<std::int8_t>(band(rng));
  return s;
}

inline StratifiedMap sparse_bands(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::bernoulli_distribution nonzero(0.3);
  std::uniform_int_distribution<int> band(-2, 2);
  StratifiedMap s(rows, cols, 0);
  for (auto& v : s.values()) v = nonzero(rng) ? static_cast<std::int8_t>(band(rng)) : std::int8_t{0};
  return s;
}

inline CandidateHeatmap random_heatmap(std::size_t channels, std::size_t rows, std::size_t cols,
                                       std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  CandidateHeatmap h(channels, rows, cols);
  for (auto& v : h.values()) v = u(rng);
  return h;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("xaibench_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace xaibench::testing
