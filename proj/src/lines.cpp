#include "npr/lines.hpp"

#include <cmath>
#include <stdexcept>

#include "npr/parallel.hpp"

namespace npr {

LineImage detect_nd_edges(const NormalDepthMap& nd, double k_depth, double k_normal) {
  if (k_depth < 0.0 || k_normal < 0.0) throw std::invalid_argument("detect_nd_edges: weights must be >= 0");
  const int w = nd.width();
  const int h = nd.height();
  Image<NormalDepth> decoded(w, h);
  for (std::size_t i = 0; i < nd.size(); ++i) decoded[i] = unpack_normal_depth(nd[i]);

  LineImage out(w, h, 0.0f);
  parallel_for(static_cast<std::size_t>(h), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < w; ++x) {
        const NormalDepth& a = decoded.clamped(x - 1, y - 1);
        const NormalDepth& b = decoded.clamped(x + 1, y + 1);
        const NormalDepth& c = decoded.clamped(x + 1, y - 1);
        const NormalDepth& d = decoded.clamped(x - 1, y + 1);
        const double depth_term = std::abs(a.depth - b.depth) + std::abs(c.depth - d.depth);
        const double normal_term = length(a.normal - b.normal) + length(c.normal - d.normal);
        out.at(x, y) = static_cast<float>(std::clamp(k_depth * depth_term + k_normal * normal_term, 0.0, 1.0));
      }
    }
  });
  return out;
}

LineImage blur(const LineImage& img, int radius) {
  if (radius < 0) throw std::invalid_argument("blur: radius must be >= 0");
  if (radius == 0) return img;
  const int w = img.width();
  const int h = img.height();
  const double norm = 1.0 / (2 * radius + 1);
  Image<double> horizontal(w, h, 0.0);
  parallel_for(static_cast<std::size_t>(h), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius); ++k) sum += img.at(k, y);
        horizontal.at(x, y) = sum * norm;
      }
    }
  });
  LineImage out(w, h, 0.0f);
  parallel_for(static_cast<std::size_t>(h), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int k = std::max(0, y - radius); k <= std::min(h - 1, y + radius); ++k) sum += horizontal.at(x, k);
        out.at(x, y) = static_cast<float>(sum * norm);
      }
    }
  });
  return out;
}

LineImage composite_lines(const LineImage& geom, const LineImage& nd, double w_geom, double w_nd, int blur_radius) {
  require_same_size(geom, nd, "composite_lines");
  if (w_geom < 0.0 || w_nd < 0.0 || w_geom + w_nd > 1.0 + 1e-9)
    throw std::invalid_argument("composite_lines: weights must be >= 0 and sum to at most 1");
  const LineImage blurred = blur(geom, blur_radius);
  LineImage out(geom.width(), geom.height(), 0.0f);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(w_geom * blurred[i] + w_nd * nd[i], 0.0, 1.0));
  }
  return out;
}

double remap_line_value(double darkness, double threshold, double b_min, double b_max) {
  if (darkness <= threshold) return 1.0;
  const double t = std::min(1.0, (darkness - threshold) / (1.0 - threshold));
  return b_max - (b_max - b_min) * t;
}

LineValueImage remap_line_brightness(const LineImage& composite, double threshold, double b_min, double b_max) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw std::invalid_argument("remap: threshold must lie in [0, 1)");
  if (!(b_min > 0.0 && b_min < b_max && b_max <= 1.0))
    throw std::invalid_argument("remap: requires 0 < b_min < b_max <= 1");
  LineValueImage out(composite.width(), composite.height(), 1.0f);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(remap_line_value(composite[i], threshold, b_min, b_max));
  }
  return out;
}

}  // namespace npr
