#include "filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace clothgrasp::detail {

GaussianKernels make_gaussian_kernels(double sigma) {
  GaussianKernels k;
  k.radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  const int n = 2 * k.radius + 1;
  k.g.resize(n);
  k.d1.resize(n);
  k.d2.resize(n);
  double gsum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.g[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    gsum += k.g[i];
  }
  for (auto& v : k.g) v /= gsum;

  // First derivative: antisymmetric, scaled so that it is exact on x.
  double m1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.d1[i] = x * k.g[i];
    m1 += x * k.d1[i];
  }
  for (auto& v : k.d1) v /= m1;

  // Second derivative: zero DC (exact zero on constants and ramps), scaled
  // to be exact on x^2.
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.d2[i] = (x * x - sigma * sigma) * k.g[i];
    mean += k.d2[i];
  }
  mean /= n;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.d2[i] -= mean;
    m2 += x * x * k.d2[i];
  }
  for (auto& v : k.d2) v *= 2.0 / m2;
  return k;
}

double extended(const Grid<double>& g, int x, int y) {
  const int w = g.width();
  const int h = g.height();
  if (y < 0 || y >= h) {
    if (h == 1) return extended(g, x, 0);
    const int edge = y < 0 ? 0 : h - 1;
    return 2.0 * extended(g, x, edge) - extended(g, x, 2 * edge - y);
  }
  if (x < 0 || x >= w) {
    if (w == 1) return g(0, y);
    const int edge = x < 0 ? 0 : w - 1;
    return 2.0 * g(edge, y) - extended(g, 2 * edge - x, y);
  }
  return g(x, y);
}

Grid<double> filled_depth(const DepthImage& img) {
  const int w = img.width();
  const int h = img.height();
  Grid<double> out(w, h, 0.0);
  std::vector<std::uint8_t> row_has(h, 0);
  for (int y = 0; y < h; ++y) {
    int last = -1;
    std::vector<int> left(w, -1);
    for (int x = 0; x < w; ++x) {
      if (img.valid(x, y)) last = x;
      left[x] = last;
    }
    int next = -1;
    for (int x = w - 1; x >= 0; --x) {
      if (img.valid(x, y)) next = x;
      int src = -1;
      if (left[x] >= 0 && next >= 0) {
        src = (x - left[x] <= next - x) ? left[x] : next;
      } else {
        src = left[x] >= 0 ? left[x] : next;
      }
      if (src >= 0) {
        out(x, y) = img.at(src, y);
        row_has[y] = 1;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    if (row_has[y]) continue;
    int best = -1;
    for (int d = 1; d < h && best < 0; ++d) {
      if (y - d >= 0 && row_has[y - d]) best = y - d;
      else if (y + d < h && row_has[y + d]) best = y + d;
    }
    if (best < 0) continue;
    for (int x = 0; x < w; ++x) out(x, y) = out(x, best);
  }
  return out;
}

Grid<double> correlate_rows(const Grid<double>& src, const std::vector<double>& k, int radius) {
  const int w = src.width();
  const int h = src.height();
  Grid<double> out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (x >= radius && x + radius < w) {
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * src(x + i, y);
      } else {
        for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * extended(src, x + i, y);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

Grid<double> correlate_cols(const Grid<double>& src, const std::vector<double>& k, int radius) {
  const int w = src.width();
  const int h = src.height();
  Grid<double> out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int i = -radius; i <= radius; ++i) {
      const double kv = k[i + radius];
      const int yy = y + i;
      if (yy >= 0 && yy < h) {
        for (int x = 0; x < w; ++x) out(x, y) += kv * src(x, yy);
      } else {
        for (int x = 0; x < w; ++x) out(x, y) += kv * extended(src, x, yy);
      }
    }
  }
  return out;
}

Mask support_validity(const DepthImage& img, int radius) {
  const int w = img.width();
  const int h = img.height();
  Grid<long> integral(w + 1, h + 1, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      integral(x + 1, y + 1) = integral(x, y + 1) + integral(x + 1, y) - integral(x, y) + (img.valid(x, y) ? 0 : 1);
    }
  }
  Mask valid(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int y0 = std::max(0, y - radius);
      const int x1 = std::min(w, x + radius + 1);
      const int y1 = std::min(h, y + radius + 1);
      const long missing = integral(x1, y1) - integral(x0, y1) - integral(x1, y0) + integral(x0, y0);
      const long total = static_cast<long>(x1 - x0) * (y1 - y0);
      valid(x, y) = 2 * missing <= total ? 1 : 0;
    }
  }
  return valid;
}

}  // namespace clothgrasp::detail
