#include "clothgrasp/wrinkle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "filters.hpp"

namespace clothgrasp {

void VesselnessParams::validate() const {
  if (scales.empty()) throw InvalidArgument("vesselness: scale set is empty");
  for (double s : scales) {
    if (!(s > 0.0)) throw InvalidArgument("vesselness: scales must be positive");
  }
  if (!(beta > 0.0)) throw InvalidArgument("vesselness: beta must be positive");
  if (c && !(*c > 0.0)) throw InvalidArgument("vesselness: c must be positive");
  if (!(min_strength >= 0.0)) throw InvalidArgument("vesselness: min_strength must be >= 0");
}

int orientation_bin(const SphericalNormal& s) {
  constexpr double kPi = std::numbers::pi;
  const int row = std::clamp(static_cast<int>(std::floor(s.inclination / kPi * kOrientationBins)), 0,
                             kOrientationBins - 1);
  const int col = std::clamp(static_cast<int>(std::floor((s.azimuth + kPi) / (2.0 * kPi) * kOrientationBins)),
                             0, kOrientationBins - 1);
  return row * kOrientationBins + col;
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

namespace {

void require_organized(const NormalMap& nmap, const char* who) {
  if (!nmap.organized) throw InvalidArgument(std::string(who) + ": normal map must be organized");
}

// Histogram bin per pixel, -1 where the normal is missing.
Grid<int> orientation_bins(const NormalMap& nmap) {
  const auto [w, h] = *nmap.organized;
  Grid<int> bins(w, h, -1);
  for (std::size_t i = 0; i < nmap.size(); ++i) {
    if (nmap.valid[i]) bins.data()[i] = orientation_bin(to_spherical(nmap.normals[i]));
  }
  return bins;
}

}  // namespace

OrientationHistogram orientation_histogram(const NormalMap& nmap, Pixel center, int window) {
  require_organized(nmap, "orientation_histogram");
  if (window < 3 || window % 2 == 0) throw InvalidArgument("orientation_histogram: window must be odd and >= 3");
  const auto [w, h] = *nmap.organized;
  if (!(center.x >= 0 && center.y >= 0 && center.x < w && center.y < h)) {
    throw InvalidArgument("orientation_histogram: center out of bounds");
  }
  OrientationHistogram hist{};
  const int half = window / 2;
  std::size_t n = 0;
  for (int y = std::max(0, center.y - half); y <= std::min(h - 1, center.y + half); ++y) {
    for (int x = std::max(0, center.x - half); x <= std::min(w - 1, center.x + half); ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!nmap.valid[i]) continue;
      hist[orientation_bin(to_spherical(nmap.normals[i]))] += 1.0;
      ++n;
    }
  }
  if (n > 0) {
    for (auto& v : hist) v /= static_cast<double>(n);
  }
  return hist;
}

EntropyMap entropy_filter(const NormalMap& nmap, int window) {
  require_organized(nmap, "entropy_filter");
  if (window < 3 || window % 2 == 0) throw InvalidArgument("entropy_filter: window must be odd and >= 3");
  const auto [w, h] = *nmap.organized;
  const Grid<int> bins = orientation_bins(nmap);
  const int half = window / 2;

  // H = log2(N) - (1/N) * sum_i c_i log2 c_i, maintained incrementally as the
  // window slides along each row.
  std::vector<double> clog(static_cast<std::size_t>(window) * window + 2, 0.0);
  for (std::size_t c = 2; c < clog.size(); ++c) clog[c] = c * std::log2(static_cast<double>(c));

  EntropyMap out{Grid<double>(w, h, 0.0), Mask(w, h, 0)};
  std::vector<int> counts(kOrientationBins * kOrientationBins, 0);

  for (int y = 0; y < h; ++y) {
    std::fill(counts.begin(), counts.end(), 0);
    double s = 0.0;
    int n = 0;
    int occupied = 0;  // one occupied bin means exactly zero, whatever the drift in s
    const int y0 = std::max(0, y - half);
    const int y1 = std::min(h - 1, y + half);
    auto column = [&](int x, int delta) {
      for (int yy = y0; yy <= y1; ++yy) {
        const int b = bins(x, yy);
        if (b < 0) continue;
        int& c = counts[b];
        if (delta > 0) {
          s += clog[c + 1] - clog[c];
          occupied += c == 0;
          ++c;
          ++n;
        } else {
          s -= clog[c] - clog[c - 1];
          --c;
          occupied -= c == 0;
          --n;
        }
      }
    };
    for (int x = 0; x <= std::min(w - 1, half); ++x) column(x, +1);
    for (int x = 0; x < w; ++x) {
      if (x > 0) {
        if (x + half < w) column(x + half, +1);
        if (x - half - 1 >= 0) column(x - half - 1, -1);
      }
      if (bins(x, y) < 0) continue;
      out.valid(x, y) = 1;
      out.values(x, y) = occupied > 1 ? std::max(0.0, std::log2(static_cast<double>(n)) - s / n) : 0.0;
    }
  }
  return out;
}

HessianField hessian_field(const DepthImage& img, double sigma) {
  if (img.empty()) throw InvalidArgument("hessian_field: empty image");
  if (!(sigma > 0.0)) throw InvalidArgument("hessian_field: sigma must be positive");
  const detail::GaussianKernels k = detail::make_gaussian_kernels(sigma);
  const Grid<double> f = detail::filled_depth(img);
  const double norm = sigma * sigma;

  HessianField out;
  const Grid<double> rows_d2 = detail::correlate_rows(f, k.d2, k.radius);
  const Grid<double> rows_d1 = detail::correlate_rows(f, k.d1, k.radius);
  const Grid<double> rows_g = detail::correlate_rows(f, k.g, k.radius);
  out.dxx = detail::correlate_cols(rows_d2, k.g, k.radius);
  out.dxy = detail::correlate_cols(rows_d1, k.d1, k.radius);
  out.dyy = detail::correlate_cols(rows_g, k.d2, k.radius);
  for (auto* g : {&out.dxx, &out.dxy, &out.dyy}) {
    for (auto& v : g->data()) v *= norm;
  }
  out.valid = detail::support_validity(img, k.radius);
  return out;
}

HessianEigen eigen_symmetric(double a, double b, double c) {
  HessianEigen e;
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  const double hi = mean + rad;
  const double lo = mean - rad;
  if (std::abs(lo) <= std::abs(hi)) {
    e.lambda1 = lo;
    e.lambda2 = hi;
  } else {
    e.lambda1 = hi;
    e.lambda2 = lo;
  }
  if (rad == 0.0) {
    e.e1 = Eigen::Vector2d::UnitX();
  } else {
    // Two algebraically equivalent eigenvector candidates; keep the better conditioned one.
    const Eigen::Vector2d u(e.lambda1 - c, b);
    const Eigen::Vector2d v(b, e.lambda1 - a);
    e.e1 = (u.squaredNorm() >= v.squaredNorm() ? u : v).normalized();
  }
  e.e2 = Eigen::Vector2d(-e.e1.y(), e.e1.x());
  return e;
}

HessianEigen hessian_at_scale(const DepthImage& img, Pixel p, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("hessian_at_scale: sigma must be positive");
  if (!img.contains(p)) throw InvalidArgument("hessian_at_scale: pixel out of bounds");
  const detail::GaussianKernels k = detail::make_gaussian_kernels(sigma);
  const Grid<double> f = detail::filled_depth(img);
  const int w = img.width();
  const int h = img.height();
  double dxx = 0.0, dxy = 0.0, dyy = 0.0;
  long missing = 0, total = 0;
  for (int j = -k.radius; j <= k.radius; ++j) {
    for (int i = -k.radius; i <= k.radius; ++i) {
      const double v = detail::extended(f, p.x + i, p.y + j);
      dxx += k.d2[i + k.radius] * k.g[j + k.radius] * v;
      dxy += k.d1[i + k.radius] * k.d1[j + k.radius] * v;
      dyy += k.g[i + k.radius] * k.d2[j + k.radius] * v;
      const int ux = p.x + i;
      const int uy = p.y + j;
      if (ux >= 0 && uy >= 0 && ux < w && uy < h) {
        ++total;
        missing += img.valid(ux, uy) ? 0 : 1;
      }
    }
  }
  const double norm = sigma * sigma;
  HessianEigen e = eigen_symmetric(norm * dxx, norm * dxy, norm * dyy);
  e.valid = 2 * missing <= total;
  return e;
}

double vesselness_response(double lambda1, double lambda2, double beta, double c, RidgePolarity polarity) {
  if (polarity == RidgePolarity::kPositive ? !(lambda2 > 0.0) : !(lambda2 < 0.0)) return 0.0;
  if (!(c > 0.0)) return 0.0;
  // A saddle with equal magnitudes has no ridge direction; round-off alone would pick lambda2.
  if (lambda1 * lambda2 < 0.0 && std::abs(lambda1 + lambda2) <= 1e-9 * std::abs(lambda2)) return 0.0;
  const double rb = lambda1 / lambda2;
  const double s2 = lambda1 * lambda1 + lambda2 * lambda2;
  return std::exp(-rb * rb / (2.0 * beta * beta)) * (1.0 - std::exp(-s2 / (2.0 * c * c)));
}

namespace {

// Hessian eigenvalues at one scale; flat pixels keep zeros.
struct ScaleEigen {
  double sigma = 0.0;
  Grid<double> l1, l2;
  Mask valid;
  double max_norm = 0.0;
};

ScaleEigen scale_eigen(const DepthImage& img, double sigma, const VesselnessParams& params) {
  const HessianField hf = hessian_field(img, sigma);
  const int w = img.width();
  const int h = img.height();
  ScaleEigen se{sigma, Grid<double>(w, h, 0.0), Grid<double>(w, h, 0.0), hf.valid, 0.0};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const HessianEigen e = eigen_symmetric(hf.dxx(x, y), hf.dxy(x, y), hf.dyy(x, y));
      if (std::hypot(e.lambda1, e.lambda2) <= params.min_strength) continue;
      se.l1(x, y) = e.lambda1;
      se.l2(x, y) = e.lambda2;
      if (hf.valid(x, y)) se.max_norm = std::max(se.max_norm, std::hypot(e.lambda1, e.lambda2));
    }
  }
  return se;
}

VesselnessMap scale_response(const ScaleEigen& se, double c, const VesselnessParams& params) {
  const int w = se.l1.width();
  const int h = se.l1.height();
  VesselnessMap out{Grid<double>(w, h, 0.0), Grid<double>(w, h, se.sigma), se.valid};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!se.valid(x, y)) continue;
      out.values(x, y) = vesselness_response(se.l1(x, y), se.l2(x, y), params.beta, c, params.polarity);
    }
  }
  return out;
}

}  // namespace

VesselnessMap vesselness_at_scale(const DepthImage& img, double sigma, const VesselnessParams& params) {
  params.validate();
  const ScaleEigen se = scale_eigen(img, sigma, params);
  return scale_response(se, params.c.value_or(0.5 * se.max_norm), params);
}

VesselnessMap multiscale_vesselness(const DepthImage& img, const VesselnessParams& params) {
  params.validate();
  std::vector<double> scales = params.scales;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  // One c for every scale: a c per scale would lift each scale's strongest
  // structure to the same response and leave best_scale meaningless.
  std::vector<ScaleEigen> eig;
  double max_norm = 0.0;
  for (double s : scales) {
    eig.push_back(scale_eigen(img, s, params));
    max_norm = std::max(max_norm, eig.back().max_norm);
  }
  const double c = params.c.value_or(0.5 * max_norm);

  VesselnessMap out = scale_response(eig.front(), c, params);
  for (std::size_t s = 1; s < eig.size(); ++s) {
    const VesselnessMap next = scale_response(eig[s], c, params);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.valid.data()[i] = out.valid.data()[i] || next.valid.data()[i];
      if (next.values.data()[i] > out.values.data()[i]) {
        out.values.data()[i] = next.values.data()[i];
        out.best_scale.data()[i] = scales[s];
      }
    }
  }
  return out;
}

PeakList find_local_maxima(const Grid<double>& values, const Mask& valid, int radius, double threshold) {
  if (radius < 1) throw InvalidArgument("find_local_maxima: radius must be >= 1");
  if (!values.same_shape(valid)) throw InvalidArgument("find_local_maxima: validity shape mismatch");
  const int w = values.width();
  const int h = values.height();

  std::vector<Pixel> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if ((dx != 0 || dy != 0) && dx * dx + dy * dy <= radius * radius) offsets.push_back({dx, dy});
    }
  }

  PeakList peaks;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!valid(x, y)) continue;
      const double v = values(x, y);
      if (!(v >= threshold)) continue;
      bool is_max = true;
      for (const Pixel& o : offsets) {
        const int xx = x + o.x;
        const int yy = y + o.y;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h || !valid(xx, yy)) continue;
        if (!(v > values(xx, yy))) {
          is_max = false;
          break;
        }
      }
      if (is_max) peaks.push_back({{x, y}, v});
    }
  }

  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  PeakList kept;
  const long r2 = static_cast<long>(radius) * radius;
  for (const Peak& p : peaks) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Peak& q) {
      const long dx = p.pixel.x - q.pixel.x;
      const long dy = p.pixel.y - q.pixel.y;
      return dx * dx + dy * dy < r2;
    });
    if (clear) kept.push_back(p);
  }
  return kept;
}

PeakList find_local_maxima(const EntropyMap& map, int radius, double threshold) {
  return find_local_maxima(map.values, map.valid, radius, threshold);
}

PeakList find_local_maxima(const VesselnessMap& map, int radius, double threshold) {
  return find_local_maxima(map.values, map.valid, radius, threshold);
}

double nonzero_percentile(const Grid<double>& values, const Mask& valid, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("nonzero_percentile: q must lie in [0, 1]");
  std::vector<double> nz;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid.data()[i] && values.data()[i] != 0.0) nz.push_back(values.data()[i]);
  }
  if (nz.empty()) return std::numeric_limits<double>::infinity();
  std::sort(nz.begin(), nz.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(nz.size())));
  return nz[rank == 0 ? 0 : std::min(rank, nz.size()) - 1];
}

namespace {

RoughnessIndex roughness_impl(const Grid<double>& values, const Mask* valid, const Mask& mask) {
  if (!values.same_shape(mask)) throw InvalidArgument("roughness_index: mask shape differs from map");
  std::vector<double> sample;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask.data()[i]) continue;
    any = true;
    if (valid && !valid->data()[i]) continue;
    sample.push_back(values.data()[i]);
  }
  if (!any) throw InvalidArgument("roughness_index: empty mask");
  RoughnessIndex r;
  if (sample.empty()) return r;

  double sum = 0.0;
  double peak = 0.0;
  for (double v : sample) {
    sum += v;
    peak = std::max(peak, v);
  }
  r.mean = sum / static_cast<double>(sample.size());

  constexpr int kBins = 64;
  std::array<double, kBins> hist{};
  for (double v : sample) {
    const int b = peak > 0.0 ? std::clamp(static_cast<int>(std::floor(v / peak * kBins)), 0, kBins - 1) : 0;
    hist[b] += 1.0;
  }
  for (auto& v : hist) v /= static_cast<double>(sample.size());
  r.entropy = shannon_entropy(hist);
  return r;
}

}  // namespace

RoughnessIndex roughness_index(const Grid<double>& values, const Mask& garment_mask) {
  return roughness_impl(values, nullptr, garment_mask);
}

RoughnessIndex roughness_index(const VesselnessMap& map, const Mask& garment_mask) {
  return roughness_impl(map.values, &map.valid, garment_mask);
}

RoughnessIndex roughness_index(const EntropyMap& map, const Mask& garment_mask) {
  return roughness_impl(map.values, &map.valid, garment_mask);
}

VesselnessParams roughness_vesselness_params() {
  VesselnessParams p;
  p.c = 1e-3;
  return p;
}

}  // namespace clothgrasp
