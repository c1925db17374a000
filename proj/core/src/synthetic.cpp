#include "clothgrasp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace clothgrasp {

std::string_view garment_class_name(GarmentClass c) {
  switch (c) {
    case GarmentClass::kPant: return "pant";
    case GarmentClass::kShirt: return "shirt";
    case GarmentClass::kTShirt: return "tshirt";
  }
  return "?";
}

std::optional<GarmentClass> parse_garment_class(std::string_view text) {
  for (GarmentClass c : {GarmentClass::kPant, GarmentClass::kShirt, GarmentClass::kTShirt}) {
    if (text == garment_class_name(c)) return c;
  }
  return std::nullopt;
}

GarmentLabel key_part_label(GarmentClass c) {
  switch (c) {
    case GarmentClass::kPant: return GarmentLabel::kWaistPant;
    case GarmentClass::kShirt: return GarmentLabel::kNeckShirt;
    case GarmentClass::kTShirt: return GarmentLabel::kNeckTShirt;
  }
  return GarmentLabel::kNoDetection;
}

void SyntheticSceneSpec::validate() const {
  if (!(table_depth > 0.0)) throw InvalidArgument("synthetic: table depth must be positive");
  if (wrinkle_count < 0) throw InvalidArgument("synthetic: wrinkle count must be >= 0");
  if (!(wrinkle_amplitude > 0.0)) throw InvalidArgument("synthetic: wrinkle amplitude must be positive");
  if (!(wrinkle_wavelength > 2.0)) throw InvalidArgument("synthetic: wrinkle wavelength must exceed 2 px");
  if (width < 64 || height < 64) throw InvalidArgument("synthetic: image must be at least 64x64");
}

namespace {

using Vec2 = Eigen::Vector2d;

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Signed distance to a simple polygon, negative inside.
double polygon_sdf(const std::vector<Vec2>& poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    d = std::min(d, segment_distance(p, poly[j], poly[i]));
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y())) {
      inside = !inside;
    }
  }
  return inside ? -d : d;
}

// Garment outline in the local frame: origin at the key-part opening
// center, u to the right, v down (pixels).
std::vector<Vec2> outline(GarmentClass c, double top) {
  std::vector<Vec2> p;
  switch (c) {
    case GarmentClass::kPant:
      p = {{-72, 0}, {72, 0}, {88, 235}, {20, 235}, {0, 95}, {-20, 235}, {-88, 235}};
      break;
    case GarmentClass::kTShirt:
      p = {{-50, 0},   {-110, 14}, {-170, 60}, {-148, 98}, {-108, 72}, {-104, 235},
           {104, 235}, {108, 72},  {148, 98},  {170, 60},  {110, 14},  {50, 0}};
      break;
    case GarmentClass::kShirt:
      p = {{-50, 0},   {-112, 14}, {-228, 150}, {-200, 175}, {-110, 80}, {-106, 245},
           {106, 245}, {110, 80},  {200, 175},  {228, 150},  {112, 14},  {50, 0}};
      break;
  }
  for (Vec2& v : p) v.y() += top;
  return p;
}

// Key-part opening: a Gaussian bowl in the elliptic radius r measured in
// units of the wall semi-axes, so the wall is steepest at r = 1. The rim at
// r = kRimRadius is the annotated outline, the edge of the garment mask and
// the place of the grasp points.
struct Opening {
  double a = 15;       // wall semi-axis along u (px)
  double b = 15;       // wall semi-axis along v (px)
  double bowl = 0.01;  // depth at the center (m)
};

constexpr double kRimRadius = 1.2;
constexpr double kBowlCutoff = 3.5;

double bowl_profile(double r) {
  if (r >= kBowlCutoff) return 0.0;
  const double tail = std::exp(-0.5 * kBowlCutoff * kBowlCutoff);
  return (std::exp(-0.5 * r * r) - tail) / (1.0 - tail);
}

Opening opening_for(GarmentClass c, double scale) {
  Opening o;
  switch (c) {
    case GarmentClass::kPant:
      o = {18, 12.5, 0.014};
      break;
    case GarmentClass::kShirt:
      o = {12, 12, 0.02};
      break;
    case GarmentClass::kTShirt:
      o = {16, 11, 0.008};
      break;
  }
  o.a *= scale;
  o.b *= scale;
  return o;
}

struct Ridge {
  Vec2 start;
  Vec2 dir;
  double length = 0;
  double half_width = 0;  // cross-section half width (px)
  double amplitude = 0;   // m
  double decay = 0;       // along-ridge decay length, 0 = cosine window
};

double ridge_height(const Ridge& r, const Vec2& p) {
  const Vec2 d = p - r.start;
  const double s = d.dot(r.dir);
  if (s < 0.0 || s > r.length) return 0.0;
  const double t = std::abs(d.x() * r.dir.y() - d.y() * r.dir.x());
  if (t >= r.half_width) return 0.0;
  const double across = 0.5 * (1.0 + std::cos(std::numbers::pi * t / r.half_width));
  double along;
  if (r.decay > 0.0) {
    along = std::exp(-s / r.decay) * smoothstep(s / 3.0) * smoothstep((r.length - s) / 6.0);
  } else {
    along = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * s / r.length));
  }
  return r.amplitude * across * along;
}

}  // namespace

SyntheticScene generate_scene(const SyntheticSceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };

  const int W = spec.width;
  const int H = spec.height;
  const double scale = uniform(0.92, 1.08);
  const double angle = uniform(-0.15, 0.15);
  const Vec2 center(W / 2.0 + uniform(-30, 30), H * 0.29 + uniform(-15, 15));
  const double tilt_x = uniform(-2e-5, 2e-5);
  const double tilt_y = uniform(-2e-5, 2e-5);

  const Opening op = opening_for(spec.garment, scale);
  const double base = 0.012;  // garment thickness (m)
  const double edge = 4.0;    // silhouette falloff (px)
  std::vector<Vec2> poly = outline(spec.garment, -(kRimRadius * op.b + 32.0 * scale));
  for (Vec2& v : poly) v *= scale;

  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  auto to_image = [&](const Vec2& l) {
    return Vec2(center.x() + ca * l.x() - sa * l.y(), center.y() + sa * l.x() + ca * l.y());
  };
  auto to_local = [&](const Vec2& g) {
    const Vec2 d = g - center;
    return Vec2(ca * d.x() + sa * d.y(), -sa * d.x() + ca * d.y());
  };

  // Elliptic radius of the opening, 1 on the wall.
  auto opening_rho = [&](const Vec2& l) { return std::hypot(l.x() / op.a, l.y() / op.b); };

  std::vector<Ridge> ridges;
  if (spec.garment != GarmentClass::kPant) {
    // Shoulder seams leaving the neck sideways.
    const double drop = uniform(0.15, 0.35);
    for (int s : {-1, 1}) {
      Ridge r;
      r.dir = Vec2(s * std::cos(drop), std::sin(drop));
      r.start = Vec2(s * 0.95 * op.a, 0.0);
      r.length = 70 * scale;
      r.half_width = 3.0;
      r.amplitude = uniform(0.01, 0.013);
      r.decay = 35.0;
      ridges.push_back(r);
    }
  } else {
    // Side creases where the front and back panels meet inside the waist.
    for (int s : {-1, 1}) {
      Ridge r;
      r.dir = Vec2(s, 0.0);
      r.start = Vec2(s * 0.45 * op.a, 0.0);
      r.length = 0.5 * op.a;
      r.half_width = 3.0;
      r.amplitude = uniform(0.016, 0.02);
      ridges.push_back(r);
    }
  }

  // Wrinkles: raised cosine folds scattered over the garment away from the
  // key part, plus a low undulation.
  const double keep_out = kBowlCutoff * std::max(op.a, op.b) + 20.0;
  std::vector<Ridge> wrinkles;
  for (int i = 0, tries = 0; i < spec.wrinkle_count && tries < 1000; ++tries) {
    const Vec2 c(uniform(-230, 230), uniform(-40, 240));
    if (polygon_sdf(poly, c) > -10.0 || c.norm() < keep_out + 30.0) continue;
    const double phi = uniform(0.0, std::numbers::pi);
    const double len = uniform(40.0, 140.0);
    Ridge r;
    r.dir = Vec2(std::cos(phi), std::sin(phi));
    r.start = c - 0.5 * len * r.dir;
    r.length = len;
    r.half_width = 0.5 * spec.wrinkle_wavelength * uniform(0.8, 1.2);
    r.amplitude = spec.wrinkle_amplitude * uniform(0.6, 1.0);
    wrinkles.push_back(r);
    ++i;
  }
  const double wave_dir = uniform(0.0, std::numbers::pi);
  const double wave_phase = uniform(0.0, 2.0 * std::numbers::pi);
  const double wave_len = 3.0 * spec.wrinkle_wavelength;

  SyntheticScene scene;
  scene.depth = DepthImage(W, H);
  scene.garment_mask = Mask(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Vec2 l = to_local(Vec2(x, y));
      const double table = spec.table_depth + tilt_x * (x - W / 2.0) + tilt_y * (y - H / 2.0);
      const double sd = polygon_sdf(poly, l);
      double h = 0.0;
      if (sd < edge) {
        const double presence = smoothstep((edge - sd) / (2.0 * edge));
        const double rho = opening_rho(l);
        double surface = base;
        surface -= op.bowl * bowl_profile(rho);
        const double near = smoothstep((l.norm() - keep_out) / 50.0);
        double folds = 0.0;
        for (const Ridge& r : wrinkles) folds += ridge_height(r, l);
        const double along_wave = l.x() * std::cos(wave_dir) + l.y() * std::sin(wave_dir);
        folds += 0.25 * spec.wrinkle_amplitude * std::sin(2.0 * std::numbers::pi * along_wave / wave_len + wave_phase);
        double seams = 0.0;
        for (const Ridge& r : ridges) seams += ridge_height(r, l);
        h = presence * (surface + near * folds + seams);
        if (sd < 0.0 && rho >= kRimRadius) scene.garment_mask(x, y) = 1;
      }
      scene.depth.set(x, y, static_cast<float>(table - std::max(h, 0.0)));
    }
  }

  AnnotationRecord& rec = scene.annotation;
  rec.id = std::string(garment_class_name(spec.garment)) + "-" + std::to_string(spec.seed);
  rec.key_part_label = key_part_label(spec.garment);
  const int n = 24;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    const Vec2 g = to_image(kRimRadius * Vec2(op.a * std::cos(t), op.b * std::sin(t)));
    rec.key_part_polygon.push_back(Pixel{static_cast<int>(std::lround(g.x())), static_cast<int>(std::lround(g.y()))});
  }
  for (int s : {-1, 1}) {
    const Vec2 g = to_image(Vec2(s * kRimRadius * op.a, 0.0));
    rec.grasp_points.push_back(Pixel{static_cast<int>(std::lround(g.x())), static_cast<int>(std::lround(g.y()))});
  }
  rec.garment_mask_path = rec.id + "_mask.pgm";
  return scene;
}

}  // namespace clothgrasp
