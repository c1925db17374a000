#pragma once

// Wrinkle analysis on depth images: the surface-normal orientation entropy
// filter, the multiscale Hessian vesselness filter, peak extraction and the
// garment roughness indices.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "clothgrasp/geometry.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp {

inline constexpr int kOrientationBins = 64;

/// Normalized 64x64 histogram over (inclination, azimuth); row-major with
/// the inclination bin as the row.
using OrientationHistogram = std::array<double, kOrientationBins * kOrientationBins>;

/// Per-pixel entropy in bits, with a validity mask.
struct EntropyMap {
  Grid<double> values;
  Mask valid;
};

/// Per-pixel vesselness in [0, 1] and the scale that produced it.
struct VesselnessMap {
  Grid<double> values;
  Grid<double> best_scale;
  Mask valid;
};

/// Hessian eigen-decomposition at one pixel, ordered |lambda1| <= |lambda2|.
struct HessianEigen {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::Vector2d e1 = Eigen::Vector2d::UnitX();
  Eigen::Vector2d e2 = Eigen::Vector2d::UnitY();
  bool valid = true;
};

/// Sign of the dominant eigenvalue that counts as a ridge.
enum class RidgePolarity {
  kPositive,  ///< local depth minimum across the ridge (surface bulging toward the camera)
  kNegative,  ///< local depth maximum across the ridge (creases, valleys)
};

struct VesselnessParams {
  std::vector<double> scales{1.0, 2.0, 4.0, 8.0};
  double beta = 0.5;
  /// Structureness sensitivity. When unset, half of the largest Hessian
  /// Frobenius norm in the image over all scales of the call.
  std::optional<double> c;
  RidgePolarity polarity = RidgePolarity::kPositive;
  /// Hessian strength sqrt(l1^2 + l2^2), in meters, at or below which a pixel
  /// counts as flat. Float depth leaves round-off near 1e-8 on planes.
  double min_strength = 1e-6;

  void validate() const;
};

struct Peak {
  Pixel pixel;
  double value = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Peaks sorted by descending value, ties in row-major pixel order.
using PeakList = std::vector<Peak>;

struct RoughnessIndex {
  double mean = 0.0;
  double entropy = 0.0;
};

/// Bin of an inclination/azimuth pair in the 64x64 orientation histogram.
int orientation_bin(const SphericalNormal& s);

/// Shannon entropy in bits of a probability vector; 0*log0 counts as 0.
double shannon_entropy(std::span<const double> p);

/// Histogram of valid normal orientations in the `window` x `window`
/// neighbourhood of `center`, normalized to sum 1 (all zero when no valid
/// normal falls in the window).
OrientationHistogram orientation_histogram(const NormalMap& nmap, Pixel center, int window);

/// Entropy of orientation_histogram at every pixel with a valid normal.
EntropyMap entropy_filter(const NormalMap& nmap, int window);

/// Scale-normalized Gaussian-derivative Hessian (sigma^2 * second derivatives).
struct HessianField {
  Grid<double> dxx;
  Grid<double> dxy;
  Grid<double> dyy;
  Mask valid;
};

/// Hessian of the sigma-smoothed depth over the whole image. Missing depth
/// is filled from the nearest valid sample of the row (then column) before
/// smoothing; pixels whose support window is more than half missing are
/// flagged invalid. Borders are extended by point reflection, which keeps
/// planes planar.
HessianField hessian_field(const DepthImage& img, double sigma);

/// Eigen-decomposition of a symmetric 2x2 matrix [[a, b], [b, c]].
HessianEigen eigen_symmetric(double a, double b, double c);

/// Hessian eigen-decomposition at a single pixel (same kernels as hessian_field).
HessianEigen hessian_at_scale(const DepthImage& img, Pixel p, double sigma);

/// Frangi-style ridge measure from a pair of ordered eigenvalues.
double vesselness_response(double lambda1, double lambda2, double beta, double c,
                           RidgePolarity polarity);

VesselnessMap vesselness_at_scale(const DepthImage& img, double sigma, const VesselnessParams& params);

/// Pointwise maximum of vesselness_at_scale over params.scales; ties keep
/// the smallest scale.
VesselnessMap multiscale_vesselness(const DepthImage& img, const VesselnessParams& params);

/// Pixels strictly greater than every valid pixel within `radius` (Euclidean)
/// and >= threshold, after greedy non-maximum suppression.
PeakList find_local_maxima(const Grid<double>& values, const Mask& valid, int radius, double threshold);
PeakList find_local_maxima(const EntropyMap& map, int radius, double threshold);
PeakList find_local_maxima(const VesselnessMap& map, int radius, double threshold);

/// Nearest-rank quantile of the nonzero valid values; +infinity when there are none.
double nonzero_percentile(const Grid<double>& values, const Mask& valid, double q);

/// Mean response and 64-bin response-histogram entropy (bits) over the mask.
RoughnessIndex roughness_index(const Grid<double>& values, const Mask& garment_mask);
RoughnessIndex roughness_index(const VesselnessMap& map, const Mask& garment_mask);
RoughnessIndex roughness_index(const EntropyMap& map, const Mask& garment_mask);

/// Vesselness settings for roughness compared across images: c fixed at
/// 1e-3 m. The per-image default rescales each garment to its own strongest
/// fold, which hides amplitude.
VesselnessParams roughness_vesselness_params();

}  // namespace clothgrasp
