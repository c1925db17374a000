#pragma once

// Active contours seeded at candidate peaks, and the mask geometry used by
// grasp-point selection.

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "clothgrasp/geometry.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp {

/// Closed polyline in subpixel image coordinates (x = column, y = row).
struct Contour {
  std::vector<Eigen::Vector2d> vertices;

  std::size_t size() const noexcept { return vertices.size(); }
};

/// Signed shoelace area; positive for counter-clockwise in (x, y).
double polygon_area(const Contour& c);
double perimeter(const Contour& c);

struct SnakeParams {
  double alpha = 0.1;           ///< elasticity
  double beta_rigidity = 0.05;  ///< bending
  double gamma = 1.0;           ///< step size of the semi-implicit update
  double kappa = 2.0;           ///< external (edge) force weight
  int max_iters = 500;
  double convergence_eps = 0.05;  ///< mean vertex displacement in pixels
  double init_radius = 25.0;
  int n_vertices = 64;
  double edge_sigma = 2.0;  ///< smoothing applied to depth before taking its gradient

  void validate() const;
};

struct SnakeResult {
  Contour contour;
  int iterations = 0;
  bool converged = false;
  /// Total energy before the first step and after every accepted step.
  std::vector<double> energy;
};

/// Gradient magnitude of the Gaussian-smoothed depth, scaled to a maximum of 1.
Grid<double> edge_map(const DepthImage& img, double sigma);

/// Snake energy of a closed polyline over an edge map (see evolve_snake).
double snake_energy(const std::vector<Eigen::Vector2d>& v, const Grid<double>& edges, const SnakeParams& params);

/// Evolves a circle of params.init_radius around `seed` toward depth edges by
/// minimizing
///   sum alpha |v_i - v_{i-1}|^2 + beta |v_{i-1} - 2 v_i + v_{i+1}|^2 - kappa sum G(v_i)
/// with G the normalized edge map sampled bilinearly. Each step is the
/// semi-implicit update (I + gamma A) x' = x + gamma kappa grad G(x); a step
/// that would raise the energy is retried with gamma halved, so the energy
/// trace is non-increasing.
SnakeResult evolve_snake(const DepthImage& img, Pixel seed, const SnakeParams& params);

/// Same as above with a precomputed edge map (shared across seeds).
SnakeResult evolve_snake(const DepthImage& img, const Grid<double>& edges, Pixel seed, const SnakeParams& params);

/// Even-odd rasterization at pixel centers; pixels within half a pixel of
/// an edge count as boundary and are included.
Mask contour_to_mask(const Contour& c, int width, int height);

/// Centroid of the set pixels, rounded to the nearest pixel.
Pixel mask_center(const Mask& m);

/// Dilation by the disk {dx^2 + dy^2 <= radius^2}.
Mask dilate_mask(const Mask& m, int radius);

/// Set pixels with at least one 4-neighbour outside the mask or the image,
/// in row-major order.
std::vector<Pixel> mask_boundary(const Mask& m);

/// Boundary pixel pair at maximum Euclidean separation. Ties keep the pair
/// that comes first in row-major order of the first, then the second pixel.
std::pair<Pixel, Pixel> extreme_points(const Mask& m);

}  // namespace clothgrasp
