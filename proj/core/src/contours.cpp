#include "clothgrasp/contours.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/LU>

#include "filters.hpp"

namespace clothgrasp {

double polygon_area(const Contour& c) {
  const std::size_t n = c.size();
  if (n < 3) return 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = c.vertices[i];
    const auto& q = c.vertices[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

double perimeter(const Contour& c) {
  const std::size_t n = c.size();
  double len = 0.0;
  for (std::size_t i = 0; i < n && n > 1; ++i) len += (c.vertices[(i + 1) % n] - c.vertices[i]).norm();
  return len;
}

void SnakeParams::validate() const {
  if (alpha < 0.0 || beta_rigidity < 0.0 || kappa < 0.0) throw InvalidArgument("snake: weights must be >= 0");
  if (!(gamma > 0.0)) throw InvalidArgument("snake: gamma must be positive");
  if (max_iters < 1) throw InvalidArgument("snake: max_iters must be >= 1");
  if (n_vertices < 8) throw InvalidArgument("snake: n_vertices must be >= 8");
  if (!(init_radius > 0.0)) throw InvalidArgument("snake: init_radius must be positive");
  if (!(convergence_eps >= 0.0)) throw InvalidArgument("snake: convergence_eps must be >= 0");
  if (!(edge_sigma > 0.0)) throw InvalidArgument("snake: edge_sigma must be positive");
}

Grid<double> edge_map(const DepthImage& img, double sigma) {
  if (img.empty()) throw InvalidArgument("edge_map: empty image");
  const auto k = detail::make_gaussian_kernels(sigma);
  const Grid<double> f = detail::filled_depth(img);
  const Grid<double> gx = detail::correlate_cols(detail::correlate_rows(f, k.d1, k.radius), k.g, k.radius);
  const Grid<double> gy = detail::correlate_cols(detail::correlate_rows(f, k.g, k.radius), k.d1, k.radius);
  Grid<double> mag(img.width(), img.height(), 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag.data()[i] = std::hypot(gx.data()[i], gy.data()[i]);
    peak = std::max(peak, mag.data()[i]);
  }
  if (peak > 0.0) {
    for (auto& v : mag.data()) v /= peak;
  }
  return mag;
}

namespace {

double bilinear(const Grid<double>& g, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(g.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(g.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, g.width() - 1);
  const int y1 = std::min(y0 + 1, g.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1 - fx) * (1 - fy) * g(x0, y0) + fx * (1 - fy) * g(x1, y0) + (1 - fx) * fy * g(x0, y1) +
         fx * fy * g(x1, y1);
}

// Central-difference gradient of the edge map.
std::pair<Grid<double>, Grid<double>> gradient(const Grid<double>& g) {
  const int w = g.width();
  const int h = g.height();
  Grid<double> gx(w, h, 0.0), gy(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(0, x - 1), xr = std::min(w - 1, x + 1);
      const int yu = std::max(0, y - 1), yd = std::min(h - 1, y + 1);
      gx(x, y) = xr > xl ? (g(xr, y) - g(xl, y)) / (xr - xl) : 0.0;
      gy(x, y) = yd > yu ? (g(x, yd) - g(x, yu)) / (yd - yu) : 0.0;
    }
  }
  return {std::move(gx), std::move(gy)};
}

// Gradient of the internal energy is A x with A = 2 (alpha D2 + beta D2^2),
// D2 the circulant second difference.
Eigen::MatrixXd internal_matrix(int n, double alpha, double beta) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  auto at = [n](int i) { return ((i % n) + n) % n; };
  for (int i = 0; i < n; ++i) {
    a(i, i) += 2.0 * (2.0 * alpha + 6.0 * beta);
    a(i, at(i - 1)) += 2.0 * (-alpha - 4.0 * beta);
    a(i, at(i + 1)) += 2.0 * (-alpha - 4.0 * beta);
    a(i, at(i - 2)) += 2.0 * beta;
    a(i, at(i + 2)) += 2.0 * beta;
  }
  return a;
}

void clamp_to(std::vector<Eigen::Vector2d>& v, int width, int height) {
  for (auto& p : v) {
    p.x() = std::clamp(p.x(), 0.0, static_cast<double>(width - 1));
    p.y() = std::clamp(p.y(), 0.0, static_cast<double>(height - 1));
  }
}

}  // namespace

double snake_energy(const std::vector<Eigen::Vector2d>& v, const Grid<double>& edges, const SnakeParams& params) {
  const std::size_t n = v.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = v[(i + n - 1) % n];
    const auto& next = v[(i + 1) % n];
    e += params.alpha * (v[i] - prev).squaredNorm();
    e += params.beta_rigidity * (prev - 2.0 * v[i] + next).squaredNorm();
    e -= params.kappa * bilinear(edges, v[i].x(), v[i].y());
  }
  return e;
}

SnakeResult evolve_snake(const DepthImage& img, Pixel seed, const SnakeParams& params) {
  params.validate();
  return evolve_snake(img, edge_map(img, params.edge_sigma), seed, params);
}

SnakeResult evolve_snake(const DepthImage& img, const Grid<double>& edges, Pixel seed, const SnakeParams& params) {
  params.validate();
  if (!img.contains(seed)) throw InvalidArgument("evolve_snake: seed out of bounds");
  if (!img.valid(seed)) throw InvalidArgument("evolve_snake: seed on missing depth");
  if (!edges.same_shape(img.width(), img.height())) throw InvalidArgument("evolve_snake: edge map shape mismatch");

  const int n = params.n_vertices;
  std::vector<Eigen::Vector2d> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    v[i] = Eigen::Vector2d(seed.x + params.init_radius * std::cos(t), seed.y + params.init_radius * std::sin(t));
  }
  clamp_to(v, img.width(), img.height());

  const auto [gx, gy] = gradient(edges);
  const Eigen::MatrixXd a = internal_matrix(n, params.alpha, params.beta_rigidity);
  std::map<double, Eigen::PartialPivLU<Eigen::MatrixXd>> solvers;
  auto solver = [&](double step) -> const Eigen::PartialPivLU<Eigen::MatrixXd>& {
    auto it = solvers.find(step);
    if (it == solvers.end()) {
      const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) + step * a;
      it = solvers.emplace(step, Eigen::PartialPivLU<Eigen::MatrixXd>(system)).first;
    }
    return it->second;
  };

  SnakeResult result;
  double energy = snake_energy(v, edges, params);
  result.energy.push_back(energy);

  Eigen::VectorXd bx(n), by(n);
  std::vector<Eigen::Vector2d> candidate(n);
  for (int iter = 0; iter < params.max_iters; ++iter) {
    double step = params.gamma;
    bool accepted = false;
    double cand_energy = energy;
    for (int attempt = 0; attempt < 30; ++attempt, step *= 0.5) {
      for (int i = 0; i < n; ++i) {
        bx(i) = v[i].x() + step * params.kappa * bilinear(gx, v[i].x(), v[i].y());
        by(i) = v[i].y() + step * params.kappa * bilinear(gy, v[i].x(), v[i].y());
      }
      const auto& lu = solver(step);
      const Eigen::VectorXd x = lu.solve(bx);
      const Eigen::VectorXd y = lu.solve(by);
      for (int i = 0; i < n; ++i) candidate[i] = Eigen::Vector2d(x(i), y(i));
      clamp_to(candidate, img.width(), img.height());
      cand_energy = snake_energy(candidate, edges, params);
      if (cand_energy <= energy) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    double moved = 0.0;
    for (int i = 0; i < n; ++i) moved += (candidate[i] - v[i]).norm();
    moved /= n;
    v.swap(candidate);
    energy = cand_energy;
    result.energy.push_back(energy);
    result.iterations = iter + 1;
    if (moved < params.convergence_eps) {
      result.converged = true;
      break;
    }
  }

  for (const auto& p : v) {
    if (result.contour.vertices.empty() || (p - result.contour.vertices.back()).norm() > 1e-9) {
      result.contour.vertices.push_back(p);
    }
  }
  while (result.contour.size() > 1 &&
         (result.contour.vertices.front() - result.contour.vertices.back()).norm() <= 1e-9) {
    result.contour.vertices.pop_back();
  }
  return result;
}

namespace {

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

Mask contour_to_mask(const Contour& c, int width, int height) {
  Mask mask(width, height, 0);
  const std::size_t n = c.size();
  if (n == 0 || width == 0 || height == 0) return mask;

  // Interior: scanline spans between sorted edge crossings (half-open rule).
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = c.vertices[i];
      const auto& b = c.vertices[(i + 1) % n];
      if ((a.y() > y) != (b.y() > y)) xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int x1 = std::min(width - 1, static_cast<int>(std::floor(xs[k + 1])));
      for (int x = x0; x <= x1; ++x) mask(x, y) = 1;
    }
  }

  // Boundary: pixel centers within half a pixel of an edge.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = c.vertices[i];
    const auto& b = c.vertices[(i + 1) % n];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - 1)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - 1)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + 1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (segment_distance(Eigen::Vector2d(x, y), a, b) <= 0.5) mask(x, y) = 1;
      }
    }
  }
  return mask;
}

Pixel mask_center(const Mask& m) {
  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      sx += x;
      sy += y;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("mask_center: empty mask");
  return {static_cast<int>(std::lround(sx / count)), static_cast<int>(std::lround(sy / count))};
}

Mask dilate_mask(const Mask& m, int radius) {
  if (radius < 1) throw InvalidArgument("dilate_mask: radius must be >= 1");
  const int w = m.width();
  const int h = m.height();
  // Horizontal half-width of the disk at each vertical offset.
  std::vector<int> half(radius + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    half[dy] = static_cast<int>(std::floor(std::sqrt(static_cast<double>(radius * radius - dy * dy))));
  }
  // Row prefix sums allow "any set pixel in [x - hw, x + hw]" in O(1).
  Grid<int> prefix(w + 1, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) prefix(x + 1, y) = prefix(x, y) + (m(x, y) ? 1 : 0);
  }
  Mask out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int dy = -radius; dy <= radius; ++dy) {
      const int sy = y + dy;
      if (sy < 0 || sy >= h || prefix(w, sy) == 0) continue;
      const int hw = half[std::abs(dy)];
      for (int x = 0; x < w; ++x) {
        if (out(x, y)) continue;
        const int x0 = std::max(0, x - hw);
        const int x1 = std::min(w, x + hw + 1);
        if (prefix(x1, sy) - prefix(x0, sy) > 0) out(x, y) = 1;
      }
    }
  }
  return out;
}

std::vector<Pixel> mask_boundary(const Mask& m) {
  std::vector<Pixel> out;
  const int w = m.width();
  const int h = m.height();
  auto unset = [&](int x, int y) { return x < 0 || y < 0 || x >= w || y >= h || !m(x, y); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      if (unset(x - 1, y) || unset(x + 1, y) || unset(x, y - 1) || unset(x, y + 1)) out.push_back({x, y});
    }
  }
  return out;
}

std::pair<Pixel, Pixel> extreme_points(const Mask& m) {
  if (count_set(m) < 2) throw InvalidArgument("extreme_points: mask needs at least two pixels");
  const std::vector<Pixel> b = mask_boundary(m);
  long best = -1;
  std::pair<Pixel, Pixel> out{b.front(), b.front()};
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const long dx = b[i].x - b[j].x;
      const long dy = b[i].y - b[j].y;
      const long d2 = dx * dx + dy * dy;
      if (d2 > best) {
        best = d2;
        out = {b[i], b[j]};
      }
    }
  }
  return out;
}

}  // namespace clothgrasp
