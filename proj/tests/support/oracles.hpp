#pragma once

// Straightforward reimplementations used as reference results. They favour
// plain enumeration over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/evaluation.hpp"
#include "clothgrasp/grid.hpp"
#include "clothgrasp/wrinkle.hpp"

namespace clothgrasp::oracle {

inline bool in_square(Pixel c, int side, int x, int y) {
  const int lo = -(side - 1) / 2;
  const int hi = side / 2;
  return x - c.x >= lo && x - c.x <= hi && y - c.y >= lo && y - c.y <= hi;
}

/// IoU by visiting every pixel of the image.
inline double iou_by_enumeration(const Rect& a, const Rect& b, int w, int h) {
  long long inter = 0, uni = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool ia = in_square(a.center, a.side, x, y);
      const bool ib = in_square(b.center, b.side, x, y);
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Union of disks of radius r stamped at every set pixel.
inline Mask dilate_by_disk_union(const Mask& m, int r) {
  Mask out(m.width(), m.height(), 0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy <= r * r && out.contains(x + dx, y + dy)) out(x + dx, y + dy) = 1;
        }
      }
    }
  }
  return out;
}

inline bool is_boundary(const Mask& m, int x, int y) {
  if (!m(x, y)) return false;
  const int nx[4] = {x - 1, x + 1, x, x};
  const int ny[4] = {y, y, y - 1, y + 1};
  for (int i = 0; i < 4; ++i) {
    if (!m.contains(nx[i], ny[i]) || !m(nx[i], ny[i])) return true;
  }
  return false;
}

inline Pixel centroid(const Mask& m) {
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m(x, y)) sx += x, sy += y, n += 1;
    }
  }
  return {static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n))};
}

/// Squared diameter over every pair of set pixels.
inline long long squared_diameter(const Mask& m) {
  std::vector<Pixel> px;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m(x, y)) px.push_back({x, y});
    }
  }
  long long best = 0;
  for (const Pixel& a : px) {
    for (const Pixel& b : px) {
      const long long dx = a.x - b.x, dy = a.y - b.y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return best;
}

/// First boundary pair (row-major on the first pixel, then the second) at maximum separation.
inline std::pair<Pixel, Pixel> extreme_pair(const Mask& m) {
  std::vector<Pixel> b;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (is_boundary(m, x, y)) b.push_back({x, y});
    }
  }
  const long long d = squared_diameter(m);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const long long dx = b[i].x - b[j].x, dy = b[i].y - b[j].y;
      if (dx * dx + dy * dy == d) return {b[i], b[j]};
    }
  }
  return {b.front(), b.back()};
}

inline double line_distance(Pixel p, Pixel a, Pixel b) {
  const Eigen::Vector3d ap(p.x - a.x, p.y - a.y, 0.0);
  const Eigen::Vector3d ab(b.x - a.x, b.y - a.y, 0.0);
  if (ab.norm() == 0.0) return ap.norm();
  return ap.cross(ab).norm() / ab.norm();
}

inline double dist(Pixel a, Pixel b) { return std::sqrt(double(a.x - b.x) * (a.x - b.x) + double(a.y - b.y) * (a.y - b.y)); }

struct PairResult {
  std::size_t count = 0;  ///< candidates
  Pixel a, b;
  double score = 0.0;
};

/// Exhaustive neck rule over peaks in the ring dilate(mask) \ mask.
inline PairResult neck_pair(const Mask& mask, const PeakList& peaks, int radius) {
  const Mask ring = dilate_by_disk_union(mask, radius);
  const Pixel c = centroid(mask);
  std::vector<Pixel> cand;
  for (const Peak& p : peaks) {
    if (mask.contains(p.pixel) && ring[p.pixel] && !mask[p.pixel]) cand.push_back(p.pixel);
  }
  PairResult r;
  r.count = cand.size();
  std::optional<double> best;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = i + 1; j < cand.size(); ++j) {
      const double s = line_distance(c, cand[i], cand[j]);
      if (!best || s < *best) best = s, r.a = cand[i], r.b = cand[j];
    }
  }
  if (best) r.score = *best;
  return r;
}

/// Exhaustive waist rule over peaks inside the mask, both assignments to the extreme points.
inline PairResult waist_pair(const Mask& mask, const PeakList& peaks) {
  const auto [e1, e2] = extreme_pair(mask);
  std::vector<Pixel> cand;
  for (const Peak& p : peaks) {
    if (mask.contains(p.pixel) && mask[p.pixel]) cand.push_back(p.pixel);
  }
  PairResult r;
  r.count = cand.size();
  std::optional<double> best;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = i + 1; j < cand.size(); ++j) {
      const double s = std::min(dist(cand[i], e1) + dist(cand[j], e2), dist(cand[i], e2) + dist(cand[j], e1));
      if (!best || s < *best) best = s, r.a = cand[i], r.b = cand[j];
    }
  }
  if (best) r.score = *best;
  return r;
}

inline double chi_square(const VFHDescriptor& a, const VFHDescriptor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    if (a.bins[i] + b.bins[i] != 0.0) s += std::pow(a.bins[i] - b.bins[i], 2) / (a.bins[i] + b.bins[i]);
  }
  return s;
}

struct KnnResult {
  GarmentLabel label = GarmentLabel::kNoDetection;
  std::map<GarmentLabel, int> votes;
  std::map<GarmentLabel, double> summed;
  std::vector<std::size_t> neighbours;
};

/// Linear scan with a full sort; vote ties by summed distance, then label name.
inline KnnResult knn(const KnnModel& model, const VFHDescriptor& q, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < model.entries.size(); ++i) d.emplace_back(chi_square(model.entries[i].descriptor, q), i);
  std::sort(d.begin(), d.end());
  KnnResult r;
  const std::size_t kk = std::min<std::size_t>(k, d.size());
  for (std::size_t i = 0; i < kk; ++i) {
    const GarmentLabel l = model.entries[d[i].second].label;
    r.votes[l] += 1;
    r.summed[l] += d[i].first;
    r.neighbours.push_back(d[i].second);
  }
  std::optional<std::tuple<int, double, std::string>> best;
  for (const auto& [label, v] : r.votes) {
    const std::tuple<int, double, std::string> key{-v, r.summed[label], std::string(label_name(label))};
    if (!best || key < *best) best = key, r.label = label;
  }
  return r;
}

/// Strict maxima over the closed disk, ordered by value then row-major position.
inline PeakList local_maxima(const Grid<double>& v, const Mask& valid, int r, double threshold) {
  PeakList out;
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x) {
      if (!valid(x, y) || v(x, y) < threshold) continue;
      bool strict = true;
      for (int yy = 0; yy < v.height() && strict; ++yy) {
        for (int xx = 0; xx < v.width(); ++xx) {
          if ((xx == x && yy == y) || !valid(xx, yy)) continue;
          if ((xx - x) * (xx - x) + (yy - y) * (yy - y) <= r * r && v(xx, yy) >= v(x, y)) {
            strict = false;
            break;
          }
        }
      }
      if (strict) out.push_back({{x, y}, v(x, y)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return out;
}

inline std::size_t occupied_voxels(const std::vector<Eigen::Vector3d>& pts, double leaf) {
  std::set<std::tuple<long, long, long>> cells;
  for (const auto& p : pts) {
    cells.emplace(static_cast<long>(std::floor(p.x() / leaf)), static_cast<long>(std::floor(p.y() / leaf)),
                  static_cast<long>(std::floor(p.z() / leaf)));
  }
  return cells.size();
}

/// Pixel centers inside the triangle (sign test) or within half a pixel of an edge.
inline Mask triangle_mask(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, int w, int h) {
  auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u.x() * v.y() - u.y() * v.x(); };
  auto seg = [](const Eigen::Vector2d& p, const Eigen::Vector2d& s, const Eigen::Vector2d& e) {
    double best = std::min((p - s).norm(), (p - e).norm());
    const Eigen::Vector2d d = e - s;
    const double t = (p - s).dot(d) / d.squaredNorm();
    if (t > 0.0 && t < 1.0) best = std::min(best, (p - s - t * d).norm());
    return best;
  };
  Mask m(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d p(x, y);
      const double s1 = cross(b - a, p - a), s2 = cross(c - b, p - b), s3 = cross(a - c, p - c);
      const bool inside = (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
      if (inside || seg(p, a, b) <= 0.5 || seg(p, b, c) <= 0.5 || seg(p, c, a) <= 0.5) m(x, y) = 1;
    }
  }
  return m;
}

/// Entropy (bits) of the orientation counts in a square window, counted with a map.
inline double window_entropy(const NormalMap& nm, int w, int h, Pixel c, int window) {
  const double pi = std::numbers::pi;
  std::map<std::pair<int, int>, int> counts;
  int total = 0;
  const int half = window / 2;
  for (int y = c.y - half; y <= c.y + half; ++y) {
    for (int x = c.x - half; x <= c.x + half; ++x) {
      if (x < 0 || y < 0 || x >= w || y >= h) continue;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!nm.valid[i]) continue;
      const Eigen::Vector3d& n = nm.normals[i];
      const double inc = std::acos(std::clamp(n.z(), -1.0, 1.0));
      const double az = (n.x() == 0.0 && n.y() == 0.0) ? 0.0 : std::atan2(n.y(), n.x());
      const int row = std::min(63, static_cast<int>(inc / pi * 64.0));
      const int col = std::min(63, static_cast<int>((az + pi) / (2 * pi) * 64.0));
      ++counts[{row, col}];
      ++total;
    }
  }
  double hbits = 0.0;
  for (const auto& [bin, n] : counts) {
    const double p = static_cast<double>(n) / total;
    hbits -= p * std::log2(p);
  }
  return hbits;
}

}  // namespace clothgrasp::oracle
