#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "xaibench/grid.hpp"
#include "xaibench/random.hpp"

namespace xaibench {

inline constexpr int kNumClasses = 10;

enum class CellClass : int {
  kCCell = 0,
  kCCellM = 1,
  kCCellP = 2,
  kRCell = 3,
  kRCellB = 4,
  kRCellC = 5,
  kCCellT = 6,
  kCCellT3 = 7,
  kCCellT8 = 8,
  kEmpty = 9,
};

enum class CellShape { kCircular, kRectangular, kTailed, kNone };

std::string_view class_name(CellClass c);
/// Throws Error(kInvalidArgument) outside 0..9.
CellClass class_from_id(int id);
inline int class_id(CellClass c) { return static_cast<int>(c); }
CellShape shape_of(CellClass c);
/// 1, 3, 8 for the tailed classes; 0 otherwise.
int tail_count(CellClass c);

enum class BackgroundType : int { kDark = 1, kGradient = 2, kSpeckle = 3 };

BackgroundType background_from_id(int id);
inline int background_id(BackgroundType b) { return static_cast<int>(b); }

/// Geometry of one cell. Lengths are in pixels; x runs along columns and y
/// along rows, with pixel centres at integer coordinates.
struct CellParams {
  double x0 = 0.0;
  double y0 = 0.0;
  double radius = 0.0;
  double border = 0.0;           // border band thickness t
  double ellipse = 1.0;          // y_s, stretches the local y axis
  double rotation = 0.0;         // theta, radians
  double bar_thickness = 0.0;    // t_b
  double pole_thickness = 0.0;   // t_p
  double stretch = 1.0;          // v_s, pole half-length is radius * stretch
  double noise_sigma = 0.5;      // std. dev. of the Gaussian boundary jitter
  double th_border = 0.05;
  double th_body = 0.05;
  double tail_length = 0.0;      // 0 selects 1.5 * radius
  double tail_width = 0.0;       // 0 selects border
  double margin = 2.0;
};

struct CellPalette {
  Rgb border{0.95f, 0.75f, 0.25f};
  Rgb inner{0.55f, 0.45f, 0.75f};
  Rgb feature{0.15f, 0.15f, 0.55f};  // skeleton colour
  float cell_jitter = 0.03f;         // one draw per cell and channel
  float pixel_jitter = 0.02f;        // one draw per pixel and channel
};

/// Output of the cell builders. `ball` is the coloured cell (zero outside the
/// cell); masks that do not apply to the shape are left empty-valued.
struct CellLayers {
  Image ball;
  Mask border;
  Mask inner;
  Mask skeleton;
  Mask tails;

  /// Union of every part.
  Mask cell() const;
};

enum class SkeletonVariant { kMinus, kPlus };
enum class ColorVariant { kRed, kGreen, kBlue };

/// Validates CellParams against the image: r > t > 0, positive stretch
/// factors, thresholds in (0, 1], and the whole shape (extent given by
/// `clearance`) at least `margin` pixels from every edge.
void validate_params(const CellParams& p, std::size_t size, double clearance);

/// Distance from the centre to the farthest point of the shape.
double clearance(const CellParams& p, CellShape shape);

CellLayers build_basic_ball_body(const CellParams& p, std::size_t size, const CellPalette& palette, Rng& rng);

CellLayers build_ccell_body(const CellParams& p, SkeletonVariant variant, std::size_t size,
                            const CellPalette& palette, Rng& rng);

Rgb rect_border_color(ColorVariant variant);

CellLayers build_rect_cell(const CellParams& p, ColorVariant variant, std::size_t size, Rng& rng);

CellLayers build_tailed_cell(const CellParams& p, int tails, std::size_t size, const CellPalette& palette,
                             Rng& rng);

struct BackgroundOptions {
  float dark_level = 0.06f;
  float dark_noise = 0.02f;
  float gray_level = 0.45f;
  float gray_gradient = 0.15f;
  float gray_noise = 0.03f;
  float speckle_level = 0.65f;
  float speckle_amplitude = 0.25f;
  float speckle_tint = 0.03f;
};

Image make_background(BackgroundType type, std::size_t size, const BackgroundOptions& opts, Rng& rng);

using GroundTruthHeatmap = Grid<float>;

inline constexpr float kDiscriminativeValue = 0.9f;
inline constexpr float kLocalizationValue = 0.4f;

/// Binarizes the coloured parts of `ball` selected by the two masks
/// (mean-norm over channels >= threshold), removes the discriminative pixels
/// from the localization set, and writes 0.9 / 0.4.
GroundTruthHeatmap make_explanation(const Image& ball, const Mask& discriminative, const Mask& localization,
                                    double th_discriminative, double th_localization);

enum class FeaturePart { kBorder, kSkeleton, kTails };

/// Which part of each cell class carries the 0.9 value. Everything else in
/// the cell is 0.4.
struct ExplanationScheme {
  std::array<FeaturePart, 9> discriminative{
      FeaturePart::kBorder,   FeaturePart::kSkeleton, FeaturePart::kSkeleton,
      FeaturePart::kBorder,   FeaturePart::kBorder,   FeaturePart::kBorder,
      FeaturePart::kTails,    FeaturePart::kTails,    FeaturePart::kTails,
  };
};

struct GeneratorOptions {
  std::size_t image_size = 224;
  double noise_sigma = 0.5;
  double radius_min = 0.08;  // fractions of image_size
  double radius_max = 0.13;
  double margin = 2.0;
  double threshold = 0.05;   // th_d = th_l
  CellPalette palette;
  BackgroundOptions background;
  ExplanationScheme scheme;
};

struct Sample {
  Image image;
  CellClass label = CellClass::kEmpty;
  GroundTruthHeatmap ground_truth;
  BackgroundType background = BackgroundType::kDark;
  std::optional<CellParams> params;
  std::uint64_t seed = 0;

  std::size_t size() const { return image.rows(); }
};

/// Draws placement and shape parameters for a class.
CellParams sample_params(CellClass c, const GeneratorOptions& opts, Rng& rng);

/// Builds the cell parts for a class from fixed parameters.
CellLayers render_cell(CellClass c, const CellParams& p, const GeneratorOptions& opts, Rng& rng);

/// Ground truth for a rendered cell under the configured scheme.
GroundTruthHeatmap explain_cell(CellClass c, const CellLayers& layers, const CellParams& p,
                                const ExplanationScheme& scheme);

struct ComposedSample {
  Sample sample;
  CellLayers layers;  // empty for the Empty class
};

ComposedSample compose_sample_detailed(CellClass c, BackgroundType bg, std::uint64_t seed,
                                       const GeneratorOptions& opts = {});

/// Pure function of its arguments.
Sample compose_sample(CellClass c, BackgroundType bg, std::uint64_t seed, const GeneratorOptions& opts = {});

}  // namespace xaibench
