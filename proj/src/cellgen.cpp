#include "xaibench/cellgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "xaibench/error.hpp"

namespace xaibench {

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames{
    "CCell", "CCellM", "CCellP", "RCell", "RCellB", "RCellC", "CCellT", "CCellT3", "CCellT8", "Empty"};

constexpr Rgb kRectInner{0.6f, 0.6f, 0.6f};
constexpr Rgb kRectBorder{0.8f, 0.1f, 0.1f};
constexpr int kMaxTailAttempts = 100000;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); }

// Maps image coordinates into the cell's unrotated, centred frame.
struct LocalFrame {
  double x0, y0, c, s;

  explicit LocalFrame(const CellParams& p)
      : x0(p.x0), y0(p.y0), c(std::cos(p.rotation)), s(std::sin(p.rotation)) {}

  std::pair<double, double> operator()(std::size_t row, std::size_t col) const {
    const double dx = static_cast<double>(col) - x0;
    const double dy = static_cast<double>(row) - y0;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
};

// Per-pixel Gaussian jitter, drawn in row-major order. Zero sigma draws
// nothing so noise-free builds leave the stream untouched.
std::vector<double> draw_noise(std::size_t count, double sigma, Rng& rng) {
  std::vector<double> out(count, 0.0);
  if (sigma <= 0.0) return out;
  std::normal_distribution<double> dist(0.0, sigma);
  for (auto& v : out) v = dist(rng);
  return out;
}

Rgb jitter_color(const Rgb& base, float amount, Rng& rng) {
  Rgb out = base;
  if (amount <= 0.0f) return out;
  std::uniform_real_distribution<float> dist(-amount, amount);
  for (auto& ch : out) ch = std::clamp(ch + dist(rng), 0.0f, 1.0f);
  return out;
}

void paint(Image& img, const Mask& mask, const Rgb& color, float pixel_jitter, Rng& rng) {
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    for (std::size_t c = 0; c < mask.cols(); ++c) {
      if (mask(r, c)) img.set(r, c, jitter_color(color, pixel_jitter, rng));
    }
  }
}

Mask mask_or(const Mask& a, const Mask& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Mask out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(a[i] || b[i]);
  return out;
}

void mask_subtract(Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i]) a[i] = 0;
  }
}

// Ball geometry shared by the circular and tailed builders.
void build_ball_masks(const CellParams& p, std::size_t size, Rng& rng, Mask& border, Mask& inner) {
  border = Mask(size, size, 0);
  inner = Mask(size, size, 0);
  const LocalFrame frame(p);
  const auto noise = draw_noise(size * size, p.noise_sigma, rng);
  const double inner_radius = p.radius - p.border;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const auto [u, v] = frame(r, c);
      const double d = std::hypot(u, v / p.ellipse) + noise[r * size + c];
      border(r, c) = static_cast<std::uint8_t>(d <= p.radius && d >= inner_radius);
      inner(r, c) = static_cast<std::uint8_t>(d < inner_radius);
    }
  }
}

double effective_tail_length(const CellParams& p) { return p.tail_length > 0.0 ? p.tail_length : 1.5 * p.radius; }
double effective_tail_width(const CellParams& p) { return p.tail_width > 0.0 ? p.tail_width : p.border; }

// Angles sampled uniformly on the circle, conditioned on every circular gap
// being at least 2*pi / (2 * count).
std::vector<double> sample_tail_angles(int count, Rng& rng) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const double min_gap = kTwoPi / (2.0 * count);
  std::vector<double> angles(static_cast<std::size_t>(count));
  for (int attempt = 0; attempt < kMaxTailAttempts; ++attempt) {
    for (auto& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    bool ok = true;
    for (std::size_t i = 0; i + 1 < angles.size() && ok; ++i) ok = angles[i + 1] - angles[i] >= min_gap;
    if (ok && count > 1) ok = angles.front() + kTwoPi - angles.back() >= min_gap;
    if (ok) return angles;
  }
  // Unreachable in practice (acceptance rate for 8 tails is 1/128).
  const double phase = angle(rng);
  for (int i = 0; i < count; ++i) angles[static_cast<std::size_t>(i)] = phase + kTwoPi * i / count;
  return angles;
}

}  // namespace

std::string_view class_name(CellClass c) { return kClassNames.at(static_cast<std::size_t>(class_id(c))); }

CellClass class_from_id(int id) {
  if (id < 0 || id >= kNumClasses) invalid("cell class id out of range: " + std::to_string(id));
  return static_cast<CellClass>(id);
}

CellShape shape_of(CellClass c) {
  switch (c) {
    case CellClass::kCCell:
    case CellClass::kCCellM:
    case CellClass::kCCellP: return CellShape::kCircular;
    case CellClass::kRCell:
    case CellClass::kRCellB:
    case CellClass::kRCellC: return CellShape::kRectangular;
    case CellClass::kCCellT:
    case CellClass::kCCellT3:
    case CellClass::kCCellT8: return CellShape::kTailed;
    case CellClass::kEmpty: return CellShape::kNone;
  }
  return CellShape::kNone;
}

int tail_count(CellClass c) {
  switch (c) {
    case CellClass::kCCellT: return 1;
    case CellClass::kCCellT3: return 3;
    case CellClass::kCCellT8: return 8;
    default: return 0;
  }
}

BackgroundType background_from_id(int id) {
  if (id < 1 || id > 3) invalid("background type must be 1, 2 or 3, got " + std::to_string(id));
  return static_cast<BackgroundType>(id);
}

Mask CellLayers::cell() const { return mask_or(mask_or(mask_or(border, inner), skeleton), tails); }

double clearance(const CellParams& p, CellShape shape) {
  switch (shape) {
    case CellShape::kCircular: return p.radius * std::max({1.0, p.ellipse, p.stretch});
    case CellShape::kRectangular: return p.radius * std::hypot(1.0, p.ellipse);
    case CellShape::kTailed: return p.radius * std::max(1.0, p.ellipse) + effective_tail_length(p);
    case CellShape::kNone: return 0.0;
  }
  return 0.0;
}

void validate_params(const CellParams& p, std::size_t size, double extent) {
  if (size == 0) invalid("image size must be positive");
  if (!(p.border > 0.0)) invalid("border thickness must be positive");
  if (!(p.radius > p.border)) invalid("radius must exceed border thickness");
  if (!(p.ellipse > 0.0) || !(p.stretch > 0.0)) invalid("ellipse and stretch factors must be positive");
  if (!(p.noise_sigma >= 0.0)) invalid("noise sigma must be non-negative");
  if (!(p.th_border > 0.0 && p.th_border <= 1.0) || !(p.th_body > 0.0 && p.th_body <= 1.0)) {
    invalid("binarization thresholds must lie in (0, 1]");
  }
  const double far = static_cast<double>(size - 1);
  const double need = extent + p.margin;
  const double room = std::min({p.x0, p.y0, far - p.x0, far - p.y0});
  if (room < need) {
    std::ostringstream os;
    os << "cell at (" << p.x0 << ", " << p.y0 << ") with extent " << extent << " does not fit a " << size
       << "px image with margin " << p.margin;
    invalid(os.str());
  }
}

CellLayers build_basic_ball_body(const CellParams& p, std::size_t size, const CellPalette& palette, Rng& rng) {
  validate_params(p, size, clearance(p, CellShape::kCircular));
  CellLayers out;
  build_ball_masks(p, size, rng, out.border, out.inner);
  out.skeleton = Mask(size, size, 0);
  out.tails = Mask(size, size, 0);
  out.ball = Image(size, size);
  const Rgb inner = jitter_color(palette.inner, palette.cell_jitter, rng);
  const Rgb border = jitter_color(palette.border, palette.cell_jitter, rng);
  paint(out.ball, out.inner, inner, palette.pixel_jitter, rng);
  paint(out.ball, out.border, border, palette.pixel_jitter, rng);
  return out;
}

CellLayers build_ccell_body(const CellParams& p, SkeletonVariant variant, std::size_t size,
                            const CellPalette& palette, Rng& rng) {
  if (!(p.bar_thickness > 0.0)) invalid("minus/plus skeleton requires a bar thickness");
  if (variant == SkeletonVariant::kPlus && !(p.pole_thickness > 0.0)) {
    invalid("plus skeleton requires a pole thickness");
  }
  CellLayers out = build_basic_ball_body(p, size, palette, rng);

  // x, y <- x + noise, y + noise, on the unrotated mesh.
  const auto jitter_x = draw_noise(size * size, p.noise_sigma, rng);
  const auto jitter_y = draw_noise(size * size, p.noise_sigma, rng);
  const LocalFrame frame(p);
  const double half_bar = p.bar_thickness / 2.0;
  const double half_pole = p.pole_thickness / 2.0;
  const double pole_reach = p.radius * p.stretch;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      auto [u, v] = frame(r, c);
      u += jitter_x[r * size + c];
      v += jitter_y[r * size + c];
      const bool bar = std::abs(u) <= p.radius && std::abs(v) <= half_bar;
      // The pole only claims pixels the bar has not, so the overlap is
      // painted once.
      const bool pole = variant == SkeletonVariant::kPlus && !bar && std::abs(v) <= pole_reach &&
                        std::abs(u) <= half_pole;
      out.skeleton(r, c) = static_cast<std::uint8_t>(bar || pole);
    }
  }
  const Rgb feature = jitter_color(palette.feature, palette.cell_jitter, rng);
  paint(out.ball, out.skeleton, feature, palette.pixel_jitter, rng);
  return out;
}

Rgb rect_border_color(ColorVariant variant) {
  Rgb c = kRectBorder;
  switch (variant) {
    case ColorVariant::kRed: break;
    case ColorVariant::kGreen: std::swap(c[0], c[1]); break;
    case ColorVariant::kBlue: std::swap(c[0], c[2]); break;
  }
  return c;
}

CellLayers build_rect_cell(const CellParams& p, ColorVariant variant, std::size_t size, Rng& rng) {
  validate_params(p, size, clearance(p, CellShape::kRectangular));
  CellLayers out;
  out.border = Mask(size, size, 0);
  out.inner = Mask(size, size, 0);
  out.skeleton = Mask(size, size, 0);
  out.tails = Mask(size, size, 0);

  const auto jitter_x = draw_noise(size * size, p.noise_sigma, rng);
  const auto jitter_y = draw_noise(size * size, p.noise_sigma, rng);
  const LocalFrame frame(p);
  const double half_w = p.radius;
  const double half_h = p.radius * p.ellipse;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      auto [u, v] = frame(r, c);
      u = std::abs(u + jitter_x[r * size + c]);
      v = std::abs(v + jitter_y[r * size + c]);
      const bool body = u <= half_w && v <= half_h;
      const bool core = u < half_w - p.border && v < half_h - p.border;
      out.inner(r, c) = static_cast<std::uint8_t>(core);
      out.border(r, c) = static_cast<std::uint8_t>(body && !core);
    }
  }

  // Colours are drawn in the red frame and then permuted, so variants with
  // equal seeds are exact channel permutations of each other.
  const float cell_jitter = CellPalette{}.cell_jitter;
  const float pixel_jitter = CellPalette{}.pixel_jitter;
  out.ball = Image(size, size);
  paint(out.ball, out.inner, jitter_color(kRectInner, cell_jitter, rng), pixel_jitter, rng);
  paint(out.ball, out.border, jitter_color(kRectBorder, cell_jitter, rng), pixel_jitter, rng);
  if (variant != ColorVariant::kRed) {
    const std::size_t other = variant == ColorVariant::kGreen ? 1 : 2;
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c) std::swap(out.ball.at(r, c, 0), out.ball.at(r, c, other));
    }
  }
  return out;
}

CellLayers build_tailed_cell(const CellParams& p, int tails, std::size_t size, const CellPalette& palette,
                             Rng& rng) {
  if (tails != 1 && tails != 3 && tails != 8) invalid("tail count must be 1, 3 or 8");
  validate_params(p, size, clearance(p, CellShape::kTailed));
  CellLayers out;
  build_ball_masks(p, size, rng, out.border, out.inner);
  out.skeleton = Mask(size, size, 0);
  out.tails = Mask(size, size, 0);

  const double length = effective_tail_length(p);
  const double base_half = effective_tail_width(p) / 2.0;
  const double tip_half = std::max(1.0, base_half / 2.0);
  const double attach = p.radius - p.border / 2.0;
  const auto angles = sample_tail_angles(tails, rng);
  const LocalFrame frame(p);

  for (double phi : angles) {
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    // Ellipse boundary distance along this direction.
    const double rim = p.radius / std::hypot(cphi, sphi / p.ellipse);
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c) {
        const auto [u, v] = frame(r, c);
        const double along = u * cphi + v * sphi;
        if (along < 0.0 || along > rim + length) continue;
        const double frac = std::clamp((along - rim) / length, 0.0, 1.0);
        const double half = base_half + (tip_half - base_half) * frac;
        const double across = -u * sphi + v * cphi;
        if (std::abs(across) > half) continue;
        if (std::hypot(u, v / p.ellipse) <= attach) continue;
        out.tails(r, c) = 1;
      }
    }
  }
  mask_subtract(out.border, out.tails);
  mask_subtract(out.inner, out.tails);

  out.ball = Image(size, size);
  const Rgb inner = jitter_color(palette.inner, palette.cell_jitter, rng);
  const Rgb border = jitter_color(palette.border, palette.cell_jitter, rng);
  paint(out.ball, out.inner, inner, palette.pixel_jitter, rng);
  paint(out.ball, out.border, border, palette.pixel_jitter, rng);
  paint(out.ball, out.tails, border, palette.pixel_jitter, rng);
  return out;
}

Image make_background(BackgroundType type, std::size_t size, const BackgroundOptions& opts, Rng& rng) {
  Image img(size, size);
  switch (type) {
    case BackgroundType::kDark: {
      std::normal_distribution<float> noise(0.0f, opts.dark_noise);
      for (auto& v : img.values()) v = opts.dark_level + noise(rng);
      break;
    }
    case BackgroundType::kGradient: {
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      std::normal_distribution<float> noise(0.0f, opts.gray_noise);
      const double phi = angle(rng);
      const double centre = (static_cast<double>(size) - 1.0) / 2.0;
      const double reach = std::max(1.0, centre * std::numbers::sqrt2);
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
          const double proj = ((static_cast<double>(c) - centre) * std::cos(phi) +
                               (static_cast<double>(r) - centre) * std::sin(phi)) / reach;
          const float base = opts.gray_level + opts.gray_gradient * static_cast<float>(proj);
          for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = base + noise(rng);
        }
      }
      break;
    }
    case BackgroundType::kSpeckle: {
      std::uniform_real_distribution<float> speckle(-opts.speckle_amplitude, opts.speckle_amplitude);
      std::uniform_real_distribution<float> tint(-opts.speckle_tint, opts.speckle_tint);
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
          const float base = opts.speckle_level + speckle(rng);
          for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = base + tint(rng);
        }
      }
      break;
    }
  }
  img.clip01();
  return img;
}

GroundTruthHeatmap make_explanation(const Image& ball, const Mask& discriminative, const Mask& localization,
                                    double th_discriminative, double th_localization) {
  const std::size_t rows = ball.rows();
  const std::size_t cols = ball.cols();
  GroundTruthHeatmap heatmap(rows, cols, 0.0f);
  auto mean_norm = [&](std::size_t r, std::size_t c) {
    const Rgb v = ball.get(r, c);
    return std::sqrt(double(v[0]) * v[0] + double(v[1]) * v[1] + double(v[2]) * v[2]) / 3.0;
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const bool in_disc = !discriminative.empty() && discriminative(r, c);
      const bool in_loc = !localization.empty() && localization(r, c);
      if (!in_disc && !in_loc) continue;
      const double norm = mean_norm(r, c);
      const bool border_ex = in_disc && norm >= th_discriminative;
      bool body_ex = in_loc && norm >= th_localization;
      body_ex = body_ex && !border_ex;
      heatmap(r, c) = border_ex ? kDiscriminativeValue : (body_ex ? kLocalizationValue : 0.0f);
    }
  }
  return heatmap;
}

CellParams sample_params(CellClass c, const GeneratorOptions& opts, Rng& rng) {
  const CellShape shape = shape_of(c);
  if (shape == CellShape::kNone) invalid("the Empty class has no cell parameters");
  const double size = static_cast<double>(opts.image_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  CellParams p;
  p.border = std::max(2.0, std::round(0.014 * size));
  p.radius = std::max(uniform(opts.radius_min, opts.radius_max) * size, p.border + 2.0);
  p.ellipse = shape == CellShape::kRectangular ? uniform(0.6, 1.0) : uniform(0.85, 1.15);
  p.stretch = p.ellipse * uniform(0.8, 1.0);
  p.bar_thickness = std::max(2.0, 0.25 * p.radius);
  p.pole_thickness = p.bar_thickness;
  p.rotation = uniform(0.0, 2.0 * std::numbers::pi);
  p.noise_sigma = opts.noise_sigma;
  p.th_border = opts.threshold;
  p.th_body = opts.threshold;
  p.tail_length = 1.5 * p.radius;
  p.tail_width = p.border;
  p.margin = opts.margin;

  const double lo = clearance(p, shape) + p.margin;
  const double hi = size - 1.0 - lo;
  if (hi < lo) invalid("image size " + std::to_string(opts.image_size) + " too small for the configured radius");
  p.x0 = uniform(lo, hi);
  p.y0 = uniform(lo, hi);
  return p;
}

CellLayers render_cell(CellClass c, const CellParams& p, const GeneratorOptions& opts, Rng& rng) {
  const std::size_t size = opts.image_size;
  switch (c) {
    case CellClass::kCCell: return build_basic_ball_body(p, size, opts.palette, rng);
    case CellClass::kCCellM: return build_ccell_body(p, SkeletonVariant::kMinus, size, opts.palette, rng);
    case CellClass::kCCellP: return build_ccell_body(p, SkeletonVariant::kPlus, size, opts.palette, rng);
    case CellClass::kRCell: return build_rect_cell(p, ColorVariant::kRed, size, rng);
    case CellClass::kRCellB: return build_rect_cell(p, ColorVariant::kGreen, size, rng);
    case CellClass::kRCellC: return build_rect_cell(p, ColorVariant::kBlue, size, rng);
    case CellClass::kCCellT:
    case CellClass::kCCellT3:
    case CellClass::kCCellT8: return build_tailed_cell(p, tail_count(c), size, opts.palette, rng);
    case CellClass::kEmpty: break;
  }
  invalid("the Empty class has no cell to render");
}

GroundTruthHeatmap explain_cell(CellClass c, const CellLayers& layers, const CellParams& p,
                                const ExplanationScheme& scheme) {
  if (c == CellClass::kEmpty) return GroundTruthHeatmap(layers.ball.rows(), layers.ball.cols(), 0.0f);
  const Mask* part = nullptr;
  switch (scheme.discriminative.at(static_cast<std::size_t>(class_id(c)))) {
    case FeaturePart::kBorder: part = &layers.border; break;
    case FeaturePart::kSkeleton: part = &layers.skeleton; break;
    case FeaturePart::kTails: part = &layers.tails; break;
  }
  return make_explanation(layers.ball, *part, layers.cell(), p.th_border, p.th_body);
}

ComposedSample compose_sample_detailed(CellClass c, BackgroundType bg, std::uint64_t seed,
                                       const GeneratorOptions& opts) {
  if (opts.image_size < 16) invalid("image size must be at least 16");
  ComposedSample out;
  Sample& s = out.sample;
  s.label = c;
  s.background = bg;
  s.seed = seed;

  Rng bg_rng(derive_seed({seed, 1}));
  s.image = make_background(bg, opts.image_size, opts.background, bg_rng);
  if (c == CellClass::kEmpty) {
    s.ground_truth = GroundTruthHeatmap(opts.image_size, opts.image_size, 0.0f);
    return out;
  }

  Rng param_rng(derive_seed({seed, 2}));
  s.params = sample_params(c, opts, param_rng);
  Rng render_rng(derive_seed({seed, 3}));
  out.layers = render_cell(c, *s.params, opts, render_rng);

  const Mask cell = out.layers.cell();
  for (std::size_t r = 0; r < cell.rows(); ++r) {
    for (std::size_t col = 0; col < cell.cols(); ++col) {
      if (cell(r, col)) s.image.set(r, col, out.layers.ball.get(r, col));
    }
  }
  s.image.clip01();
  s.ground_truth = explain_cell(c, out.layers, *s.params, opts.scheme);
  return out;
}

Sample compose_sample(CellClass c, BackgroundType bg, std::uint64_t seed, const GeneratorOptions& opts) {
  return compose_sample_detailed(c, bg, seed, opts).sample;
}

}  // namespace xaibench
