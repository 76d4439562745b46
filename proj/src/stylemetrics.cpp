#include "npr/stylemetrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace npr {

Histogram256 brightness_histogram(const IntensityImage& img, const Image<std::uint8_t>* mask) {
  if (mask != nullptr) require_same_size(img, *mask, "brightness_histogram");
  Histogram256 h;
  h.masked = mask != nullptr;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask != nullptr && (*mask)[i] == 0) continue;
    ++h.bins[brightness_bin(img[i])];
    ++h.total;
  }
  return h;
}

std::string histogram_csv(const Histogram256& h) {
  std::ostringstream os;
  os << "bin,lo,hi,count\n";
  for (int k = 0; k < 256; ++k) os << k << ',' << k / 256.0 << ',' << (k + 1) / 256.0 << ',' << h.bins[k] << '\n';
  return os.str();
}

BandMass line_band_mass(const LineValueImage& lines, double b_min, double b_max, double tail_cutoff) {
  if (!(b_min < tail_cutoff && tail_cutoff <= 1.0)) throw std::invalid_argument("line_band_mass: need b_min < tail_cutoff <= 1");
  std::size_t line = 0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double v = lines[i];
    if (v >= tail_cutoff) continue;
    ++line;
    if (v >= b_min - kBandSlack && v <= b_max + kBandSlack) ++inside;
  }
  BandMass r;
  r.line_pixels = line;
  if (line > 0) r.fraction = static_cast<double>(inside) / static_cast<double>(line);
  return r;
}

namespace {

double percentile(std::vector<int>& values, double q) {
  const std::size_t k = static_cast<std::size_t>(std::ceil(q * values.size())) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

}  // namespace

WidthStats estimate_line_width(const LineValueImage& lines, double tail_cutoff) {
  const int w = lines.width();
  const int h = lines.height();
  auto is_line = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && lines.at(x, y) < tail_cutoff; };
  constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  std::vector<int> widths;
  std::vector<double> run;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!is_line(x, y)) continue;
      int best = std::numeric_limits<int>::max();
      for (const auto& d : dirs) {
        int bx = x, by = y;
        while (is_line(bx - d[0], by - d[1])) {
          bx -= d[0];
          by -= d[1];
        }
        run.clear();
        for (int cx = bx, cy = by; is_line(cx, cy); cx += d[0], cy += d[1]) run.push_back(1.0 - lines.at(cx, cy));
        const double peak = *std::max_element(run.begin(), run.end());
        const auto count = std::count_if(run.begin(), run.end(), [&](double v) { return v >= 0.5 * peak; });
        best = std::min(best, static_cast<int>(count));
      }
      widths.push_back(best);
    }
  }
  if (widths.empty()) throw MetricError("estimate_line_width: no line pixels");
  WidthStats s;
  s.samples = widths.size();
  s.median = percentile(widths, 0.5);
  s.p90 = percentile(widths, 0.9);
  return s;
}

std::optional<double> dark_floor(const IntensityImage& image, const LineValueImage& lines) {
  require_same_size(image, lines, "dark_floor");
  const int w = image.width();
  const int h = image.height();
  // Line-free 3x3 windows are those whose line-pixel count is zero.
  Image<std::uint8_t> line_mask(w, h, 0);
  for (std::size_t i = 0; i < lines.size(); ++i) line_mask[i] = lines[i] < 1.0f ? 1 : 0;
  std::optional<double> floor_value;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      double sum = 0.0;
      bool clean = true;
      for (int dy = -1; dy <= 1 && clean; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (line_mask.at(x + dx, y + dy)) {
            clean = false;
            break;
          }
          sum += image.at(x + dx, y + dy);
        }
      }
      if (!clean) continue;
      const double mean = sum / 9.0;
      if (!floor_value || mean < *floor_value) floor_value = mean;
    }
  }
  return floor_value;
}

std::optional<double> lit_band_mass(const RenderFrame& frame, double lo, double hi) {
  std::size_t lit = 0;
  std::size_t inside = 0;
  for (int y = 0; y < frame.final_image.height(); ++y) {
    for (int x = 0; x < frame.final_image.width(); ++x) {
      if (!frame.visibility.covered(x, y) || frame.shadow_fraction.at(x, y) > 0.0f || frame.line_value.at(x, y) < 1.0f)
        continue;
      ++lit;
      const double v = frame.final_image.at(x, y);
      if (v >= lo && v <= hi) ++inside;
    }
  }
  if (lit == 0) return std::nullopt;
  return static_cast<double>(inside) / static_cast<double>(lit);
}

double shadow_length_ratio(const RenderFrame& frame, const PoleFixtureDescriptor& fixture) {
  const Vec3& l = frame.light.direction;
  const double horizontal = std::hypot(l.x, l.z);
  if (horizontal < 1e-9) return 0.0;
  const double sx = -l.x / horizontal;
  const double sz = -l.z / horizontal;
  const double plane_tol = 1e-3 * std::max(1.0, fixture.height);
  std::optional<double> farthest;
  for (int y = 0; y < frame.visibility.height(); ++y) {
    for (int x = 0; x < frame.visibility.width(); ++x) {
      if (!frame.visibility.covered(x, y) || frame.shadow_fraction.at(x, y) < 0.5f) continue;
      const Vec3 p = pixel_world_position(frame.visibility, frame.camera, x, y);
      if (std::abs(p.y - fixture.plane_y) > plane_tol) continue;
      const double along = (p.x - fixture.base.x) * sx + (p.z - fixture.base.z) * sz;
      if (!farthest || along > *farthest) farthest = along;
    }
  }
  if (!farthest) throw MetricError("shadow_length_ratio: no shadowed ground pixels");
  const double footprint = fixture.half_width * (std::abs(sx) + std::abs(sz));
  return (*farthest - footprint) / fixture.height;
}

bool StyleReport::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

StyleReport evaluate_style(const RenderFrame& frame, const std::optional<PoleFixtureDescriptor>& fixture,
                           const StyleTargets& t) {
  StyleReport r;
  std::ostringstream detail;

  const BandMass band = line_band_mass(frame.line_value, t.line_b_min, t.line_b_max, t.tail_cutoff);
  r.line_band_mass = band.fraction;
  r.line_pixels = band.line_pixels;
  Image<std::uint8_t> mask(frame.line_value.width(), frame.line_value.height(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = frame.line_value[i] < t.tail_cutoff ? 1 : 0;
  r.line_histogram = brightness_histogram(frame.line_value, &mask);
  {
    Gate g{"line_band_mass", false, ""};
    if (band.fraction) {
      g.passed = *band.fraction >= t.min_band_mass;
      detail.str("");
      detail << *band.fraction << " of " << band.line_pixels << " line pixels in [" << t.line_b_min - kBandSlack << ", "
             << t.line_b_max + kBandSlack << "], need >= " << t.min_band_mass;
      g.detail = detail.str();
    } else {
      g.detail = "no line pixels";
    }
    r.gates.push_back(g);
  }
  {
    Gate g{"line_width", false, ""};
    if (band.line_pixels > 0) {
      r.line_width = estimate_line_width(frame.line_value, t.tail_cutoff);
      g.passed = r.line_width->median >= t.width_min && r.line_width->median <= t.width_max;
      detail.str("");
      detail << "median " << r.line_width->median << " px, p90 " << r.line_width->p90 << " px, need median in ["
             << t.width_min << ", " << t.width_max << "]";
      g.detail = detail.str();
    } else {
      g.detail = "no line pixels";
    }
    r.gates.push_back(g);
  }
  {
    r.dark_floor = dark_floor(frame.final_image, frame.line_value);
    Gate g{"dark_floor", false, ""};
    if (r.dark_floor) {
      g.passed = *r.dark_floor >= t.dark_floor;
      detail.str("");
      detail << "darkest line-free 3x3 mean " << *r.dark_floor << ", need >= " << t.dark_floor;
      g.detail = detail.str();
    } else {
      g.detail = "no line-free region";
    }
    r.gates.push_back(g);
  }
  r.lit_band_mass = lit_band_mass(frame, t.lit_lo, t.lit_hi);
  if (fixture) {
    Gate g{"shadow_length_ratio", false, ""};
    r.expected_shadow_ratio = ground_shadow_length_per_height(frame.light);
    try {
      r.shadow_length_ratio = shadow_length_ratio(frame, *fixture);
      const double expected = *r.expected_shadow_ratio;
      g.passed = std::abs(*r.shadow_length_ratio - expected) <= t.shadow_ratio_tolerance * std::max(expected, 1e-9);
      detail.str("");
      detail << "measured " << *r.shadow_length_ratio << ", expected " << expected << " +/- "
             << t.shadow_ratio_tolerance * 100.0 << "%";
      g.detail = detail.str();
    } catch (const MetricError& e) {
      g.detail = e.what();
    }
    r.gates.push_back(g);
  }
  return r;
}

nlohmann::json report_to_json(const StyleReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json(); };
  nlohmann::json doc;
  doc["line_band_mass"] = opt(r.line_band_mass);
  doc["line_pixels"] = r.line_pixels;
  doc["dark_floor"] = opt(r.dark_floor);
  doc["lit_band_mass"] = opt(r.lit_band_mass);
  if (r.line_width) {
    doc["median_line_width_px"] = r.line_width->median;
    doc["p90_line_width_px"] = r.line_width->p90;
  } else {
    doc["median_line_width_px"] = nullptr;
    doc["p90_line_width_px"] = nullptr;
  }
  doc["shadow_length_ratio"] = opt(r.shadow_length_ratio);
  doc["expected_shadow_length_ratio"] = opt(r.expected_shadow_ratio);
  doc["line_histogram"] = r.line_histogram.bins;
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : r.gates) gates.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  doc["gates"] = gates;
  doc["passed"] = r.passed();
  return doc;
}

}  // namespace npr
