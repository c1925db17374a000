#pragma once

// Depth-image and point-cloud primitives: back-projection, normal
// estimation, spherical angles of normals and voxel-grid downsampling.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "clothgrasp/grid.hpp"

namespace clothgrasp {

/// Organized grid of range samples in meters. A value equal to the
/// sentinel (0) marks a missing sample and is never treated as a range.
class DepthImage {
 public:
  static constexpr float kInvalid = 0.0f;

  DepthImage() = default;
  DepthImage(int width, int height, float fill = kInvalid);
  DepthImage(int width, int height, std::vector<float> data);

  int width() const noexcept { return depth_.width(); }
  int height() const noexcept { return depth_.height(); }
  bool empty() const noexcept { return depth_.empty(); }
  bool contains(int x, int y) const noexcept { return depth_.contains(x, y); }
  bool contains(Pixel p) const noexcept { return depth_.contains(p); }

  float at(int x, int y) const noexcept { return depth_(x, y); }
  float at(Pixel p) const noexcept { return depth_[p]; }
  bool valid(int x, int y) const noexcept { return depth_(x, y) != kInvalid; }
  bool valid(Pixel p) const noexcept { return depth_[p] != kInvalid; }

  /// Sets a sample; non-finite or non-positive ranges are stored as missing.
  void set(int x, int y, float meters) noexcept;

  const Grid<float>& grid() const noexcept { return depth_; }

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  Grid<float> depth_;
};

/// Pinhole camera model.
struct CameraIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point is inside the image.
  void validate(int width, int height) const;
};

struct OrganizedShape {
  int width = 0;
  int height = 0;

  friend bool operator==(const OrganizedShape&, const OrganizedShape&) = default;
};

/// Point set in meters. Missing points keep their slot (flagged invalid,
/// coordinates zeroed) so organized clouds stay pixel-aligned.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<std::uint8_t> valid;
  std::optional<OrganizedShape> organized;
  Eigen::Vector3d viewpoint = Eigen::Vector3d::Zero();

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  std::size_t valid_count() const noexcept;
  void push_back(const Eigen::Vector3d& p, bool is_valid = true);
};

/// Per-point unit normals aligned with the cloud they were estimated from.
struct NormalMap {
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::uint8_t> valid;
  std::optional<OrganizedShape> organized;

  std::size_t size() const noexcept { return normals.size(); }
};

/// Inclination in [0, pi] and azimuth in (-pi, pi] of a unit vector.
struct SphericalNormal {
  double inclination = 0.0;
  double azimuth = 0.0;
};

/// Back-projects every pixel through the pinhole model; missing pixels
/// become invalid points. The viewpoint is the camera origin.
PointCloud depth_to_cloud(const DepthImage& img, const CameraIntrinsics& k);

/// Same as depth_to_cloud but keeps only pixels set in `region`.
PointCloud depth_to_cloud(const DepthImage& img, const CameraIntrinsics& k, const Mask& region);

/// Projects a camera-frame point back to subpixel image coordinates.
Eigen::Vector2d project(const Eigen::Vector3d& p, const CameraIntrinsics& k);

/// Normal per point from the smallest-eigenvalue eigenvector of the covariance
/// of all valid points within `radius` meters, flipped toward the viewpoint.
/// Points with fewer than three valid neighbours are flagged invalid.
NormalMap estimate_normals(const PointCloud& cloud, double radius);

/// Spherical angles of a unit normal. At the pole (x = y = 0) the azimuth is 0.
SphericalNormal to_spherical(const Eigen::Vector3d& n);

/// Inverse of to_spherical for a unit vector.
Eigen::Vector3d from_spherical(const SphericalNormal& s);

/// Replaces the points of each occupied cubic voxel of side `leaf` by their
/// centroid. Voxels are anchored at the origin and emitted in lexicographic
/// (ix, iy, iz) order. The result is unorganized.
PointCloud voxel_downsample(const PointCloud& cloud, double leaf);

}  // namespace clothgrasp
