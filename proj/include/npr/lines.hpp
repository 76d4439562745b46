#pragma once

#include "npr/image.hpp"
#include "npr/raster.hpp"

namespace npr {

// Image-space edge response from a normal-depth map. For each pixel the diagonal
// neighbours A=(x-1,y-1), B=(x+1,y+1), C=(x+1,y-1), D=(x-1,y+1) (clamped to the image) give
//   darkness = clamp(k_depth * (|dA-dB| + |dC-dD|) + k_normal * (|nA-nB| + |nC-nD|), 0, 1).
LineImage detect_nd_edges(const NormalDepthMap& nd, double k_depth, double k_normal);

// Separable box blur of half-width radius. Samples outside the image count as zero.
LineImage blur(const LineImage& img, int radius);

// clamp(w_geom * blur(geom, blur_radius) + w_nd * nd, 0, 1). Darkness-space composition.
LineImage composite_lines(const LineImage& geom, const LineImage& nd, double w_geom, double w_nd, int blur_radius);

// Maps darkness to a multiplier: d <= threshold -> 1; otherwise falls linearly from
// b_max (just above threshold) to b_min (d = 1).
LineValueImage remap_line_brightness(const LineImage& composite, double threshold, double b_min, double b_max);

double remap_line_value(double darkness, double threshold, double b_min, double b_max);

}  // namespace npr
