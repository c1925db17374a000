#pragma once

// Depth-image fixtures shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "clothgrasp/geometry.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp::fixture {

inline DepthImage plane_image(int w, int h, float depth) { return DepthImage(w, h, depth); }

/// depth = base + gx * x + gy * y
inline DepthImage ramp_image(int w, int h, double base, double gx, double gy) {
  DepthImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.set(x, y, static_cast<float>(base + gx * x + gy * y));
  }
  return img;
}

/// Straight ridge bulging toward the camera: a Gaussian dip of standard
/// deviation `sigma` px across the line through `p` with direction angle `theta`.
inline DepthImage ridge_image(int w, int h, Eigen::Vector2d p, double theta, double sigma, double amplitude,
                              double base = 1.0) {
  const Eigen::Vector2d n(-std::sin(theta), std::cos(theta));
  DepthImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = n.dot(Eigen::Vector2d(x, y) - p);
      img.set(x, y, static_cast<float>(base - amplitude * std::exp(-d * d / (2.0 * sigma * sigma))));
    }
  }
  return img;
}

/// Isotropic Gaussian bump toward the camera.
inline DepthImage bump_image(int w, int h, Eigen::Vector2d c, double sigma, double amplitude, double base = 1.0) {
  DepthImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r2 = (Eigen::Vector2d(x, y) - c).squaredNorm();
      img.set(x, y, static_cast<float>(base - amplitude * std::exp(-r2 / (2.0 * sigma * sigma))));
    }
  }
  return img;
}

/// Disk of radius `r` raised by `step` meters above the background.
inline DepthImage disk_step_image(int w, int h, Eigen::Vector2d c, double r, double step, double base = 1.0) {
  DepthImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool inside = (Eigen::Vector2d(x, y) - c).norm() <= r;
      img.set(x, y, static_cast<float>(inside ? base - step : base));
    }
  }
  return img;
}

/// Random blob: union of a few random disks, clipped to the grid.
inline Mask random_blob(std::mt19937_64& rng, int w, int h, int disks) {
  std::uniform_int_distribution<int> cx(w / 4, 3 * w / 4);
  std::uniform_int_distribution<int> cy(h / 4, 3 * h / 4);
  std::uniform_int_distribution<int> rad(2, std::max(3, std::min(w, h) / 6));
  Mask m(w, h, 0);
  for (int i = 0; i < disks; ++i) {
    const int x0 = cx(rng), y0 = cy(rng), r = rad(rng);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if ((x - x0) * (x - x0) + (y - y0) * (y - y0) <= r * r) m(x, y) = 1;
      }
    }
  }
  return m;
}

}  // namespace clothgrasp::fixture
