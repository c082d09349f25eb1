#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "xaibench/cellgen.hpp"
#include "xaibench/error.hpp"
#include "xaibench/raster.hpp"

namespace xaibench {
namespace {

constexpr std::size_t kSize = 96;

CellParams centred(double radius, double border) {
  CellParams p;
  p.x0 = 48.0;
  p.y0 = 48.0;
  p.radius = radius;
  p.border = border;
  p.noise_sigma = 0.0;
  return p;
}

std::array<double, 3> mean_color(const Image& img, const Mask& mask) {
  std::array<double, 3> sum{};
  std::size_t n = 0;
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      if (!mask(r, c)) continue;
      for (std::size_t ch = 0; ch < 3; ++ch) sum[ch] += img.at(r, c, ch);
      ++n;
    }
  }
  for (auto& s : sum) s /= static_cast<double>(n);
  return sum;
}

Mask intersect(const Mask& a, const Mask& b) {
  Mask out(a.rows(), a.cols(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

TEST(BasicBall, NoiseFreeBorderIsTheClosedAnnulus) {
  Rng rng(1);
  const auto layers = build_basic_ball_body(centred(20.0, 3.0), kSize, CellPalette{}, rng);
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t c = 0; c < kSize; ++c) {
      const double d = std::hypot(double(r) - 48.0, double(c) - 48.0);
      ASSERT_EQ(layers.border(r, c) != 0, d >= 17.0 && d <= 20.0) << r << "," << c;
      ASSERT_EQ(layers.inner(r, c) != 0, d < 17.0) << r << "," << c;
    }
  }
}

TEST(BasicBall, EllipseStretchesVerticalExtent) {
  auto p = centred(12.0, 2.0);
  p.ellipse = 2.0;
  p.y0 = 47.5;
  Rng rng(2);
  const auto layers = build_basic_ball_body(p, kSize, CellPalette{}, rng);
  std::size_t min_r = kSize, max_r = 0, min_c = kSize, max_c = 0;
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t c = 0; c < kSize; ++c) {
      if (!layers.inner(r, c)) continue;
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
  }
  const double vertical = double(max_r - min_r + 1);
  const double horizontal = double(max_c - min_c + 1);
  EXPECT_NEAR(vertical / horizontal, 2.0, 0.15);
}

TEST(BasicBall, FixedSeedGivesIdenticalMasks) {
  auto p = centred(20.0, 3.0);
  p.noise_sigma = 0.5;
  Rng a(77), b(77);
  const auto la = build_basic_ball_body(p, kSize, CellPalette{}, a);
  const auto lb = build_basic_ball_body(p, kSize, CellPalette{}, b);
  EXPECT_EQ(la.border, lb.border);
  EXPECT_EQ(la.inner, lb.inner);
  EXPECT_EQ(la.ball, lb.ball);
}

TEST(BasicBall, RejectsBorderThickerThanRadius) {
  Rng rng(1);
  EXPECT_THROW(build_basic_ball_body(centred(3.0, 3.0), kSize, CellPalette{}, rng), Error);
}

TEST(BasicBall, RejectsCellTooCloseToEdge) {
  auto p = centred(20.0, 3.0);
  p.x0 = 10.0;
  Rng rng(1);
  try {
    build_basic_ball_body(p, kSize, CellPalette{}, rng);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(Skeleton, MinusIsOneHorizontalBar) {
  auto p = centred(20.5, 3.0);
  p.bar_thickness = 3.0;
  Rng rng(3);
  const auto layers = build_ccell_body(p, SkeletonVariant::kMinus, kSize, CellPalette{}, rng);
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t c = 0; c < kSize; ++c) {
      const bool in_bar = std::abs(double(c) - 48.0) <= 20.5 && std::abs(double(r) - 48.0) <= 1.5;
      ASSERT_EQ(layers.skeleton(r, c) != 0, in_bar) << r << "," << c;
    }
  }
  EXPECT_EQ(count_components(layers.skeleton), 1u);
}

TEST(Skeleton, PlusCountsOverlapOnce) {
  auto p = centred(20.5, 3.0);
  p.bar_thickness = 3.0;
  p.pole_thickness = 5.0;
  p.stretch = 0.8;
  Rng rng(4);
  const auto layers = build_ccell_body(p, SkeletonVariant::kPlus, kSize, CellPalette{}, rng);
  std::size_t bar = 0, pole = 0, both = 0;
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t c = 0; c < kSize; ++c) {
      const double u = double(c) - 48.0, v = double(r) - 48.0;
      const bool in_bar = std::abs(u) <= 20.5 && std::abs(v) <= 1.5;
      const bool in_pole = std::abs(v) <= 20.5 * 0.8 && std::abs(u) <= 2.5;
      bar += in_bar;
      pole += in_pole;
      both += in_bar && in_pole;
    }
  }
  EXPECT_EQ(count_set(layers.skeleton), bar + pole - both);
}

TEST(Skeleton, PlusIsSymmetricUnderQuarterTurn) {
  auto p = centred(20.5, 3.0);
  p.bar_thickness = 3.4;
  p.pole_thickness = 3.4;
  Rng a(5), b(5);
  const auto upright = build_ccell_body(p, SkeletonVariant::kPlus, kSize, CellPalette{}, a);
  p.rotation = std::numbers::pi / 2.0;
  const auto turned = build_ccell_body(p, SkeletonVariant::kPlus, kSize, CellPalette{}, b);
  EXPECT_EQ(upright.skeleton, turned.skeleton);
}

TEST(Skeleton, RequiresThicknesses) {
  auto p = centred(20.0, 3.0);
  Rng rng(1);
  EXPECT_THROW(build_ccell_body(p, SkeletonVariant::kMinus, kSize, CellPalette{}, rng), Error);
  p.bar_thickness = 3.0;
  EXPECT_THROW(build_ccell_body(p, SkeletonVariant::kPlus, kSize, CellPalette{}, rng), Error);
}

TEST(RectCell, NoiseFreeBorderIsRectangularRing) {
  auto p = centred(15.5, 3.0);
  p.ellipse = 0.7;
  Rng rng(6);
  const auto layers = build_rect_cell(p, ColorVariant::kRed, kSize, rng);
  const double hw = 15.5, hh = 15.5 * 0.7;
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t c = 0; c < kSize; ++c) {
      const double u = std::abs(double(c) - 48.0), v = std::abs(double(r) - 48.0);
      const bool outer = u <= hw && v <= hh;
      const bool core = u < hw - 3.0 && v < hh - 3.0;
      ASSERT_EQ(layers.border(r, c) != 0, outer && !core);
      ASSERT_EQ(layers.inner(r, c) != 0, core);
    }
  }
}

TEST(RectCell, RedBorderColourIsNearNominal) {
  auto p = centred(15.0, 3.0);
  p.noise_sigma = 0.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto layers = build_rect_cell(p, ColorVariant::kRed, kSize, rng);
    const auto mean = mean_color(layers.ball, layers.border);
    EXPECT_NEAR(mean[0], 0.8, 0.05);
    EXPECT_NEAR(mean[1], 0.1, 0.05);
    EXPECT_NEAR(mean[2], 0.1, 0.05);
  }
}

TEST(RectCell, VariantsPermuteChannelsOnly) {
  auto p = centred(15.0, 3.0);
  p.noise_sigma = 0.5;
  p.rotation = 0.4;
  Rng a(8), b(8), c(8);
  const auto red = build_rect_cell(p, ColorVariant::kRed, kSize, a);
  const auto green = build_rect_cell(p, ColorVariant::kGreen, kSize, b);
  const auto blue = build_rect_cell(p, ColorVariant::kBlue, kSize, c);
  EXPECT_EQ(red.border, green.border);
  EXPECT_EQ(red.inner, blue.inner);
  for (std::size_t r = 0; r < kSize; ++r) {
    for (std::size_t col = 0; col < kSize; ++col) {
      ASSERT_EQ(red.ball.at(r, col, 0), green.ball.at(r, col, 1));
      ASSERT_EQ(red.ball.at(r, col, 1), green.ball.at(r, col, 0));
      ASSERT_EQ(red.ball.at(r, col, 0), blue.ball.at(r, col, 2));
      ASSERT_EQ(red.ball.at(r, col, 2), blue.ball.at(r, col, 0));
    }
  }
  const Rgb g = rect_border_color(ColorVariant::kGreen);
  EXPECT_GT(g[1], g[0]);
  EXPECT_GT(g[1], g[2]);
}

class TailedCell : public ::testing::TestWithParam<int> {};

TEST_P(TailedCell, TailsAreSeparateComponentsOutsideTheBody) {
  const int tails = GetParam();
  GeneratorOptions opts;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    auto p = centred(12.0, 3.0);
    p.noise_sigma = 0.5;
    p.rotation = 0.1 * double(seed);
    const auto layers = build_tailed_cell(p, tails, kSize, CellPalette{}, rng);
    ASSERT_EQ(count_components(layers.tails), static_cast<std::size_t>(tails)) << "seed " << seed;
    ASSERT_EQ(count_set(intersect(layers.tails, layers.inner)), 0u);
    ASSERT_EQ(count_set(intersect(layers.tails, layers.border)), 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Counts, TailedCell, ::testing::Values(1, 3, 8));

TEST(TailedCell, RejectsOtherCounts) {
  Rng rng(1);
  EXPECT_THROW(build_tailed_cell(centred(12.0, 3.0), 2, kSize, CellPalette{}, rng), Error);
}

TEST(Background, DarkIsDarkAndTypesAreOrdered) {
  std::array<double, 3> means{};
  for (int type = 1; type <= 3; ++type) {
    Rng rng(9);
    const auto img = make_background(background_from_id(type), 64, BackgroundOptions{}, rng);
    const Mask all(64, 64, 1);
    const auto m = mean_color(img, all);
    if (type == 1) {
      for (double v : m) EXPECT_LT(v, 0.2);
    }
    means[type - 1] = (m[0] + m[1] + m[2]) / 3.0;
    for (float v : img.values()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
  EXPECT_LT(means[0], means[1]);
  EXPECT_LT(means[1], means[2]);
}

TEST(Background, SameSeedIsIdentical) {
  Rng a(10), b(10);
  EXPECT_EQ(make_background(BackgroundType::kSpeckle, 48, {}, a), make_background(BackgroundType::kSpeckle, 48, {}, b));
}

TEST(Explanation, BorderFeatureClassesPutDiscriminativeValueOnBorder) {
  for (int id : {0, 3, 4, 5}) {
    const auto cls = class_from_id(id);
    const auto composed = compose_sample_detailed(cls, BackgroundType::kDark, 100 + id);
    const auto& gt = composed.sample.ground_truth;
    const auto& layers = composed.layers;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (layers.border[i]) ASSERT_EQ(gt[i], kDiscriminativeValue) << "class " << id;
      if (layers.inner[i]) ASSERT_EQ(gt[i], kLocalizationValue) << "class " << id;
    }
  }
}

TEST(Explanation, SkeletonAndTailClassesUseTheirFeature) {
  for (int id : {1, 2, 6, 7, 8}) {
    const auto cls = class_from_id(id);
    const auto composed = compose_sample_detailed(cls, BackgroundType::kGradient, 200 + id);
    const auto& gt = composed.sample.ground_truth;
    const Mask& feature = id <= 2 ? composed.layers.skeleton : composed.layers.tails;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (feature[i]) {
        ASSERT_EQ(gt[i], kDiscriminativeValue) << "class " << id;
        ++hits;
      } else if (gt[i] != 0.0f) {
        ASSERT_EQ(gt[i], kLocalizationValue) << "class " << id;
      }
    }
    EXPECT_GT(hits, 0u);
  }
}

TEST(Explanation, ThresholdsDropFaintPixels) {
  Image ball(1, 3);
  ball.set(0, 0, {0.3f, 0.3f, 0.3f});
  ball.set(0, 1, {0.01f, 0.01f, 0.01f});
  ball.set(0, 2, {0.3f, 0.3f, 0.3f});
  Mask disc(1, 3, 0), loc(1, 3, 1);
  disc(0, 0) = 1;
  const auto gt = make_explanation(ball, disc, loc, 0.05, 0.05);
  EXPECT_EQ(gt(0, 0), kDiscriminativeValue);
  EXPECT_EQ(gt(0, 1), 0.0f);
  EXPECT_EQ(gt(0, 2), kLocalizationValue);
}

TEST(ComposeSample, EmptyClassHasZeroGroundTruth) {
  for (int bg = 1; bg <= 3; ++bg) {
    const auto s = compose_sample(CellClass::kEmpty, background_from_id(bg), 5);
    for (float v : s.ground_truth.values()) ASSERT_EQ(v, 0.0f);
  }
}

TEST(ComposeSample, IsDeterministic) {
  for (int id = 0; id < kNumClasses; ++id) {
    const auto a = compose_sample(class_from_id(id), BackgroundType::kSpeckle, 42);
    const auto b = compose_sample(class_from_id(id), BackgroundType::kSpeckle, 42);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.ground_truth, b.ground_truth);
  }
}

TEST(ComposeSample, GroundTruthCoversExactlyTheCell) {
  for (int id = 0; id < 9; ++id) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto composed = compose_sample_detailed(class_from_id(id), BackgroundType::kDark, seed);
      const Mask cell = composed.layers.cell();
      const auto& gt = composed.sample.ground_truth;
      for (std::size_t i = 0; i < gt.size(); ++i) {
        ASSERT_EQ(gt[i] != 0.0f, cell[i] != 0) << "class " << id << " seed " << seed << " pixel " << i;
      }
    }
  }
}

TEST(ComposeSample, ImageValuesAreClipped) {
  for (int id = 0; id < kNumClasses; ++id) {
    const auto s = compose_sample(class_from_id(id), BackgroundType::kSpeckle, 9);
    for (float v : s.image.values()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
}

TEST(ComposeSample, HonoursImageSize) {
  GeneratorOptions opts;
  opts.image_size = 64;
  const auto s = compose_sample(CellClass::kCCell, BackgroundType::kDark, 3, opts);
  EXPECT_EQ(s.image.rows(), 64u);
  EXPECT_EQ(s.ground_truth.cols(), 64u);
}

TEST(Raster, RotationRoundTripKeepsArea) {
  auto p = centred(20.0, 3.0);
  Rng rng(11);
  const auto layers = build_rect_cell(p, ColorVariant::kRed, kSize, rng);
  const Mask cell = layers.cell();
  for (double angle : {0.3, 1.0, 2.2}) {
    const Mask there = rotate_mask(cell, angle, 48.0, 48.0);
    const Mask back = rotate_mask(there, -angle, 48.0, 48.0);
    const double a = double(count_set(cell));
    EXPECT_NEAR(double(count_set(back)), a, 0.01 * a) << angle;
  }
}

TEST(Raster, ComponentLabellingRespectsConnectivity) {
  Mask m(3, 3, 0);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 2) = 1;
  EXPECT_EQ(count_components(m, Connectivity::kEight), 1u);
  EXPECT_EQ(count_components(m, Connectivity::kFour), 3u);
}

TEST(Raster, InnerBoundaryOfFilledSquareIsItsRim) {
  Mask m(6, 6, 0);
  for (std::size_t r = 1; r < 5; ++r) {
    for (std::size_t c = 1; c < 5; ++c) m(r, c) = 1;
  }
  EXPECT_EQ(count_set(inner_boundary(m)), 12u);
}

}  // namespace
}  // namespace xaibench
