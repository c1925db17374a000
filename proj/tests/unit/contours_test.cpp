#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "clothgrasp/contours.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace clothgrasp;
constexpr double kPi = std::numbers::pi;

namespace {

Contour square(double x0, double y0, double x1, double y1) { return Contour{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}; }

std::vector<Eigen::Vector2d> circle(Eigen::Vector2d c, double r, int n) {
  std::vector<Eigen::Vector2d> v;
  for (int i = 0; i < n; ++i) v.push_back(c + r * Eigen::Vector2d(std::cos(2 * kPi * i / n), std::sin(2 * kPi * i / n)));
  return v;
}

double mean_radius(const Contour& c, Eigen::Vector2d center) {
  double s = 0.0;
  for (const auto& v : c.vertices) s += (v - center).norm();
  return s / static_cast<double>(c.size());
}

}  // namespace

TEST(Polygon, AreaAndPerimeter) {
  const Contour c = square(0, 0, 4, 3);
  EXPECT_DOUBLE_EQ(polygon_area(c), 12.0);
  EXPECT_DOUBLE_EQ(perimeter(c), 14.0);
  Contour cw = c;
  std::reverse(cw.vertices.begin(), cw.vertices.end());
  EXPECT_DOUBLE_EQ(polygon_area(cw), -12.0);
}

TEST(SnakeParams, Validate) {
  SnakeParams p;
  EXPECT_NO_THROW(p.validate());
  p.n_vertices = 7;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.max_iters = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.alpha = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(EdgeMap, PeaksOnStepAndIsNormalized) {
  const DepthImage img = fixture::disk_step_image(100, 100, {50, 50}, 20.0, 0.02);
  const Grid<double> g = edge_map(img, 2.0);
  EXPECT_DOUBLE_EQ(*std::max_element(g.data().begin(), g.data().end()), 1.0);
  EXPECT_LT(g(50, 50), 1e-6);
  EXPECT_GT(g(70, 50), 0.8);
  EXPECT_LT(edge_map(fixture::ramp_image(40, 30, 1.0, 1e-3, 0.0), 2.0)(0, 0), 1.0 + 1e-12);
}

TEST(Snake, ElasticityAloneShrinksEveryIteration) {
  const DepthImage flat = fixture::plane_image(200, 200, 1.0f);
  SnakeParams p;
  p.convergence_eps = 0.0;
  double last = 1e300;
  for (int iters = 1; iters <= 15; ++iters) {
    p.max_iters = iters;
    const SnakeResult r = evolve_snake(flat, {100, 100}, p);
    const double per = perimeter(r.contour);
    EXPECT_LT(per, last);
    last = per;
  }
}

TEST(Snake, ConvergesOnCircularStep) {
  const Eigen::Vector2d center(100, 100);
  const DepthImage img = fixture::disk_step_image(200, 200, center, 40.0, 0.02);
  SnakeParams p;
  p.init_radius = 60.0;
  const SnakeResult r = evolve_snake(img, {100, 100}, p);
  EXPECT_TRUE(r.converged);
  const double mr = mean_radius(r.contour, center);
  EXPECT_GE(mr, 37.0);
  EXPECT_LE(mr, 43.0);
  for (std::size_t i = 1; i < r.energy.size(); ++i) EXPECT_LE(r.energy[i], r.energy[i - 1]);
  EXPECT_LE(r.energy.back(), r.energy.front());

  // Brute-force minimizer over a lattice of concentric circles.
  const Grid<double> edges = edge_map(img, p.edge_sigma);
  double best_r = 0.0, best_e = 1e300;
  for (double rad = 20.0; rad <= 70.0; rad += 0.5) {
    const double e = snake_energy(circle(center, rad, p.n_vertices), edges, p);
    if (e < best_e) best_e = e, best_r = rad;
  }
  EXPECT_NEAR(mr, best_r, 3.0);
}

TEST(Snake, SeedErrors) {
  const DepthImage img = fixture::plane_image(50, 50, 1.0f);
  EXPECT_THROW(evolve_snake(img, {-5, 10}, SnakeParams{}), InvalidArgument);
  DepthImage holed = img;
  holed.set(10, 10, DepthImage::kInvalid);
  EXPECT_THROW(evolve_snake(holed, {10, 10}, SnakeParams{}), InvalidArgument);
}

TEST(Snake, StaysInBounds) {
  const DepthImage img = fixture::disk_step_image(60, 60, {5, 5}, 10.0, 0.02);
  const SnakeResult r = evolve_snake(img, {3, 3}, SnakeParams{});
  for (const auto& v : r.contour.vertices) {
    EXPECT_GE(v.x(), 0.0);
    EXPECT_GE(v.y(), 0.0);
    EXPECT_LE(v.x(), 59.0);
    EXPECT_LE(v.y(), 59.0);
  }
}

TEST(ContourToMask, SquareIncludesBoundary) {
  const Mask m = contour_to_mask(square(10, 10, 19, 19), 40, 40);
  EXPECT_EQ(count_set(m), 100u);
  EXPECT_TRUE(m(10, 10));
  EXPECT_TRUE(m(19, 19));
  EXPECT_FALSE(m(20, 19));
}

TEST(ContourToMask, CollinearIsThin) {
  const Mask m = contour_to_mask(Contour{{{2, 5}, {8, 5}, {14, 5}}}, 20, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) {
      if (y != 5) { EXPECT_FALSE(m(x, y)); }
    }
  }
}

TEST(ContourToMask, RandomTrianglesMatchOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 45.0);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector2d a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const Mask got = contour_to_mask(Contour{{a, b, c}}, 40, 40);
    EXPECT_EQ(got, oracle::triangle_mask(a, b, c, 40, 40)) << "triangle " << t;
  }
}

TEST(ContourToMask, TracedConvexBoundaryReproducesMask) {
  Mask disk(60, 60, 0);
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 60; ++x) disk(x, y) = (x - 30) * (x - 30) + (y - 28) * (y - 28) <= 18 * 18;
  }
  std::vector<Pixel> b = mask_boundary(disk);
  std::sort(b.begin(), b.end(), [](Pixel p, Pixel q) { return std::atan2(p.y - 28, p.x - 30) < std::atan2(q.y - 28, q.x - 30); });
  Contour c;
  for (const Pixel& p : b) c.vertices.emplace_back(p.x, p.y);
  const Mask back = contour_to_mask(c, 60, 60);
  Mask edge(60, 60, 0);
  for (const Pixel& p : b) edge(p.x, p.y) = 1;
  const Mask band = oracle::dilate_by_disk_union(edge, 1);
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 60; ++x) {
      if (back(x, y) != disk(x, y)) { EXPECT_TRUE(band(x, y)) << x << "," << y; }
    }
  }
}

TEST(MaskCenter, Examples) {
  Mask m(20, 20, 0);
  m(7, 3) = 1;
  EXPECT_EQ(mask_center(m), (Pixel{7, 3}));
  Mask sq(40, 40, 0);
  for (int y = 15; y <= 25; ++y) {
    for (int x = 15; x <= 25; ++x) sq(x, y) = 1;
  }
  EXPECT_EQ(mask_center(sq), (Pixel{20, 20}));
  Mask ell(30, 30, 0);
  for (int y = 2; y < 25; ++y) ell(3, y) = ell(4, y) = 1;
  for (int x = 3; x < 20; ++x) ell(x, 24) = 1;
  EXPECT_EQ(mask_center(ell), oracle::centroid(ell));
  EXPECT_THROW(mask_center(Mask(5, 5, 0)), InvalidArgument);
}

TEST(Dilate, Examples) {
  EXPECT_EQ(count_set(dilate_mask(Mask(10, 10, 0), 3)), 0u);
  Mask one(9, 9, 0);
  one(4, 4) = 1;
  const Mask plus = dilate_mask(one, 1);
  EXPECT_EQ(count_set(plus), 5u);
  EXPECT_TRUE(plus(4, 3) && plus(3, 4) && plus(5, 4) && plus(4, 5));
  EXPECT_THROW(dilate_mask(one, 0), InvalidArgument);
}

TEST(Dilate, MatchesDiskUnionAndProperties) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 10; ++t) {
    const Mask m = fixture::random_blob(rng, 50, 40, 3);
    for (int r : {1, 3, 7}) {
      const Mask d = dilate_mask(m, r);
      EXPECT_EQ(d, oracle::dilate_by_disk_union(m, r));
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.data()[i]) { EXPECT_TRUE(d.data()[i]); }
      }
      const Mask bigger = dilate_mask(m, r + 2);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (d.data()[i]) { EXPECT_TRUE(bigger.data()[i]); }
      }
    }
  }
}

TEST(Dilate, CommutesWithTranslation) {
  Mask m(40, 40, 0), shifted(40, 40, 0);
  for (int y = 12; y < 20; ++y) {
    for (int x = 10; x < 15; ++x) m(x, y) = shifted(x + 6, y + 4) = 1;
  }
  const Mask a = dilate_mask(m, 4), b = dilate_mask(shifted, 4);
  for (int y = 0; y < 36; ++y) {
    for (int x = 0; x < 34; ++x) EXPECT_EQ(a(x, y), b(x + 6, y + 4));
  }
}

TEST(Boundary, FourNeighbourRule) {
  Mask m(5, 5, 0);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) m(x, y) = 1;
  }
  const std::vector<Pixel> b = mask_boundary(m);
  EXPECT_EQ(b.size(), 8u);
  EXPECT_EQ(std::count(b.begin(), b.end(), Pixel{2, 2}), 0);
  EXPECT_EQ(b.front(), (Pixel{1, 1}));
}

TEST(ExtremePoints, Examples) {
  Mask two(20, 20, 0);
  two(3, 4) = two(15, 9) = 1;
  EXPECT_EQ(extreme_points(two), (std::pair<Pixel, Pixel>{{3, 4}, {15, 9}}));

  Mask rect(30, 20, 0);
  for (int y = 5; y <= 10; ++y) {
    for (int x = 2; x <= 25; ++x) rect(x, y) = 1;
  }
  const auto [a, b] = extreme_points(rect);
  EXPECT_EQ(std::abs(a.x - b.x), 23);
  EXPECT_EQ(std::abs(a.y - b.y), 5);
  EXPECT_EQ((std::pair<Pixel, Pixel>{a, b}), oracle::extreme_pair(rect));

  Mask single(5, 5, 0);
  single(2, 2) = 1;
  EXPECT_THROW(extreme_points(single), InvalidArgument);
}

TEST(ExtremePoints, RandomBlobsMatchAllPairs) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> px(0, 34);
  for (int t = 0; t < 30; ++t) {
    const Mask m = fixture::random_blob(rng, 36, 30, 3);
    const auto got = extreme_points(m);
    EXPECT_EQ(got, oracle::extreme_pair(m));
    const long long d2 = static_cast<long long>(got.first.x - got.second.x) * (got.first.x - got.second.x) +
                         static_cast<long long>(got.first.y - got.second.y) * (got.first.y - got.second.y);
    EXPECT_EQ(d2, oracle::squared_diameter(m));
  }
}
