#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clothgrasp/geometry.hpp"

namespace clothgrasp::detail {

/// Uniform hash grid over the valid points of a cloud with cells of side
/// `cell`. Radius queries with radius <= cell touch at most 27 cells.
class SpatialIndex {
 public:
  SpatialIndex(const PointCloud& cloud, double cell) : cloud_(cloud), inv_cell_(1.0 / cell) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud.valid[i]) keyed.emplace_back(key_of(cloud.points[i]), i);
    }
    std::sort(keyed.begin(), keyed.end());
    order_.reserve(keyed.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      order_.push_back(keyed[i].second);
      auto [it, inserted] = cells_.try_emplace(keyed[i].first, i, i + 1);
      if (!inserted) it->second.second = i + 1;
    }
  }

  /// Indices of valid points within sqrt(r2) of q, in ascending cell-key
  /// then index order (deterministic).
  void radius_search(const Eigen::Vector3d& q, double r2, std::vector<std::size_t>& out) const {
    out.clear();
    const auto c = cell_of(q);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(pack(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == cells_.end()) continue;
          for (std::size_t k = it->second.first; k < it->second.second; ++k) {
            const std::size_t j = order_[k];
            if ((cloud_.points[j] - q).squaredNorm() <= r2) out.push_back(j);
          }
        }
      }
    }
  }

 private:
  std::array<std::int64_t, 3> cell_of(const Eigen::Vector3d& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() * inv_cell_)),
            static_cast<std::int64_t>(std::floor(p.y() * inv_cell_)),
            static_cast<std::int64_t>(std::floor(p.z() * inv_cell_))};
  }
  static std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
    constexpr std::int64_t kBias = 1 << 20;
    constexpr std::uint64_t kMask = (1u << 21) - 1;
    return ((static_cast<std::uint64_t>(x + kBias) & kMask) << 42) |
           ((static_cast<std::uint64_t>(y + kBias) & kMask) << 21) |
           (static_cast<std::uint64_t>(z + kBias) & kMask);
  }
  std::uint64_t key_of(const Eigen::Vector3d& p) const {
    const auto c = cell_of(p);
    return pack(c[0], c[1], c[2]);
  }

  const PointCloud& cloud_;
  double inv_cell_;
  std::vector<std::size_t> order_;
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> cells_;
};

}  // namespace clothgrasp::detail
