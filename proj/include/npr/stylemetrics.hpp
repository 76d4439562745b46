#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "npr/image.hpp"
#include "npr/pipeline.hpp"

namespace npr {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bin k covers brightness [k/256, (k+1)/256); 1.0 lands in bin 255.
struct Histogram256 {
  std::array<std::uint64_t, 256> bins{};
  std::uint64_t total = 0;
  bool masked = false;
};

inline int brightness_bin(double v) { return std::clamp(static_cast<int>(std::floor(v * 256.0)), 0, 255); }

// Only pixels whose mask entry is nonzero are counted when a mask is given.
Histogram256 brightness_histogram(const IntensityImage& img, const Image<std::uint8_t>* mask = nullptr);
std::string histogram_csv(const Histogram256& h);

// Pixels darker than tail_cutoff are line pixels; the returned fraction of them lies in
// [b_min - 0.02, b_max + 0.02]. Empty when there are no line pixels.
struct BandMass {
  std::optional<double> fraction;
  std::size_t line_pixels = 0;
};
inline constexpr double kBandSlack = 0.02;
BandMass line_band_mass(const LineValueImage& lines, double b_min, double b_max, double tail_cutoff = 0.95);

// Stroke width per line pixel: the smallest, over horizontal, vertical and both diagonal
// directions, of the number of pixels in the run through it whose darkness (1 - value)
// reaches half the run's peak. Throws MetricError without line pixels.
struct WidthStats {
  double median = 0.0;
  double p90 = 0.0;
  std::size_t samples = 0;
};
WidthStats estimate_line_width(const LineValueImage& lines, double tail_cutoff = 0.95);

// Minimum 3x3 mean brightness over windows that contain no line pixel (line value < 1).
std::optional<double> dark_floor(const IntensityImage& image, const LineValueImage& lines);

// Fraction of unshadowed, line-free surface pixels whose brightness lies in [lo, hi].
std::optional<double> lit_band_mass(const RenderFrame& frame, double lo = 0.6, double hi = 0.8);

struct PoleFixtureDescriptor {
  Vec3 base;
  double height = 1.0;
  double half_width = 0.05;
  double plane_y = 0.0;
};

// Farthest shadowed ground point along the shadow direction, corrected for the pole's
// footprint, divided by the pole height. Throws MetricError when no ground pixel is shadowed.
double shadow_length_ratio(const RenderFrame& frame, const PoleFixtureDescriptor& fixture);

// Reference values measured on the original drawing.
struct StyleTargets {
  double line_b_min = 0.4;
  double line_b_max = 0.8;
  double min_band_mass = 0.95;
  double tail_cutoff = 0.95;
  double width_min = 1.0;
  double width_max = 2.0;
  double dark_floor = 0.55 - 1.0 / 255.0;
  double lit_lo = 0.6;
  double lit_hi = 0.8;
  double shadow_ratio_tolerance = 0.05;  // relative to cot(elevation)
};

struct Gate {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StyleReport {
  std::optional<double> line_band_mass;
  std::size_t line_pixels = 0;
  std::optional<double> dark_floor;
  std::optional<double> lit_band_mass;
  std::optional<WidthStats> line_width;
  std::optional<double> shadow_length_ratio;
  std::optional<double> expected_shadow_ratio;
  Histogram256 line_histogram;
  std::vector<Gate> gates;

  bool passed() const;
};

StyleReport evaluate_style(const RenderFrame& frame, const std::optional<PoleFixtureDescriptor>& fixture = std::nullopt,
                           const StyleTargets& targets = {});

nlohmann::json report_to_json(const StyleReport& report);

}  // namespace npr
