#pragma once

// Separable Gaussian-derivative filtering shared by the vesselness filter
// and the snake's edge map.

#include <vector>

#include "clothgrasp/geometry.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp::detail {

/// Sampled Gaussian kernels of radius ceil(3 sigma), in correlation form.
struct GaussianKernels {
  int radius = 0;
  std::vector<double> g;   ///< smoothing, sums to 1
  std::vector<double> d1;  ///< first derivative, exact on linear data
  std::vector<double> d2;  ///< second derivative, zero DC, exact on quadratics
};

GaussianKernels make_gaussian_kernels(double sigma);

/// Sample with the grid extended by point reflection about its border
/// samples, f(-i) = 2 f(0) - f(i), so planes stay planar past the border.
double extended(const Grid<double>& g, int x, int y);

/// Depth as doubles with missing samples filled from the nearest valid one
/// in the row, then from the nearest row that had any valid sample.
Grid<double> filled_depth(const DepthImage& img);

Grid<double> correlate_rows(const Grid<double>& src, const std::vector<double>& k, int radius);
Grid<double> correlate_cols(const Grid<double>& src, const std::vector<double>& k, int radius);

/// 1 where at most half of the (2r+1)^2 window (clipped to the image) is missing depth.
Mask support_validity(const DepthImage& img, int radius);

}  // namespace clothgrasp::detail
