#include "clothgrasp/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "spatial_index.hpp"

namespace clothgrasp {

DepthImage::DepthImage(int width, int height, float fill) : depth_(width, height, fill) {
  if (width <= 0 || height <= 0) throw InvalidArgument("depth image must have positive size");
  if (!std::isfinite(fill) || fill < 0.0f) throw InvalidArgument("depth fill must be finite and >= 0");
}

DepthImage::DepthImage(int width, int height, std::vector<float> data)
    : depth_(width, height, std::move(data)) {
  if (width <= 0 || height <= 0) throw InvalidArgument("depth image must have positive size");
  for (auto& d : depth_.data()) {
    if (!std::isfinite(d) || d <= 0.0f) d = kInvalid;
  }
}

void DepthImage::set(int x, int y, float meters) noexcept {
  depth_(x, y) = (std::isfinite(meters) && meters > 0.0f) ? meters : kInvalid;
}

void CameraIntrinsics::validate(int width, int height) const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw InvalidArgument("principal point outside the image");
  }
}

std::size_t PointCloud::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [](auto v) { return v != 0; }));
}

void PointCloud::push_back(const Eigen::Vector3d& p, bool is_valid) {
  points.push_back(is_valid ? p : Eigen::Vector3d::Zero());
  valid.push_back(is_valid ? 1 : 0);
}

namespace {

PointCloud back_project(const DepthImage& img, const CameraIntrinsics& k, const Mask* region) {
  if (img.empty()) throw InvalidArgument("depth_to_cloud: zero-sized image");
  k.validate(img.width(), img.height());
  if (region && !region->same_shape(img.width(), img.height())) {
    throw InvalidArgument("depth_to_cloud: region mask shape differs from image");
  }
  PointCloud cloud;
  const auto n = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.height());
  cloud.points.reserve(n);
  cloud.valid.reserve(n);
  cloud.organized = OrganizedShape{img.width(), img.height()};
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      const bool keep = img.valid(u, v) && (!region || (*region)(u, v));
      if (!keep) {
        cloud.push_back(Eigen::Vector3d::Zero(), false);
        continue;
      }
      const double d = img.at(u, v);
      cloud.push_back({(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d});
    }
  }
  return cloud;
}

}  // namespace

PointCloud depth_to_cloud(const DepthImage& img, const CameraIntrinsics& k) {
  return back_project(img, k, nullptr);
}

PointCloud depth_to_cloud(const DepthImage& img, const CameraIntrinsics& k, const Mask& region) {
  return back_project(img, k, &region);
}

Eigen::Vector2d project(const Eigen::Vector3d& p, const CameraIntrinsics& k) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

NormalMap estimate_normals(const PointCloud& cloud, double radius) {
  if (cloud.empty()) throw InvalidArgument("estimate_normals: empty cloud");
  if (!(radius > 0.0)) throw InvalidArgument("estimate_normals: radius must be positive");

  NormalMap out;
  out.normals.assign(cloud.size(), Eigen::Vector3d::Zero());
  out.valid.assign(cloud.size(), 0);
  out.organized = cloud.organized;

  const detail::SpatialIndex index(cloud, radius);
  const double r2 = radius * radius;
  std::vector<std::size_t> neighbours;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.valid[i]) continue;
    const Eigen::Vector3d& p = cloud.points[i];
    index.radius_search(p, r2, neighbours);
    // The query point itself is always returned.
    if (neighbours.size() < 4) continue;

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (auto j : neighbours) mean += cloud.points[j];
    mean /= static_cast<double>(neighbours.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (auto j : neighbours) {
      const Eigen::Vector3d d = cloud.points[j] - mean;
      cov.noalias() += d * d.transpose();
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0);
    const double len = n.norm();
    if (!(len > 0.0)) continue;
    n /= len;
    if (n.dot(cloud.viewpoint - p) < 0.0) n = -n;
    out.normals[i] = n;
    out.valid[i] = 1;
  }
  return out;
}

SphericalNormal to_spherical(const Eigen::Vector3d& n) {
  const double r = n.norm();
  if (!(std::abs(r - 1.0) <= 1e-6)) throw InvalidArgument("to_spherical: input is not a unit vector");
  SphericalNormal s;
  s.inclination = std::acos(std::clamp(n.z() / r, -1.0, 1.0));
  if (std::hypot(n.x(), n.y()) < 1e-12) {
    s.azimuth = 0.0;
  } else {
    s.azimuth = std::atan2(n.y(), n.x());
    if (s.azimuth <= -std::numbers::pi) s.azimuth = std::numbers::pi;
  }
  return s;
}

Eigen::Vector3d from_spherical(const SphericalNormal& s) {
  const double st = std::sin(s.inclination);
  return {st * std::cos(s.azimuth), st * std::sin(s.azimuth), std::cos(s.inclination)};
}

PointCloud voxel_downsample(const PointCloud& cloud, double leaf) {
  if (!(leaf > 0.0)) throw InvalidArgument("voxel_downsample: leaf must be positive");

  struct Member {
    std::array<std::int64_t, 3> voxel;
    std::size_t index;
  };
  std::vector<Member> members;
  members.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.valid[i]) continue;
    const auto& p = cloud.points[i];
    members.push_back({{static_cast<std::int64_t>(std::floor(p.x() / leaf)),
                        static_cast<std::int64_t>(std::floor(p.y() / leaf)),
                        static_cast<std::int64_t>(std::floor(p.z() / leaf))},
                       i});
  }
  std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) {
    return a.voxel != b.voxel ? a.voxel < b.voxel : a.index < b.index;
  });

  PointCloud out;
  out.viewpoint = cloud.viewpoint;
  for (std::size_t begin = 0; begin < members.size();) {
    std::size_t end = begin;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    while (end < members.size() && members[end].voxel == members[begin].voxel) {
      sum += cloud.points[members[end].index];
      ++end;
    }
    out.push_back(sum / static_cast<double>(end - begin));
    begin = end;
  }
  return out;
}

}  // namespace clothgrasp
