#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clothgrasp/pipeline.hpp"
#include "clothgrasp/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace clothgrasp;

namespace {

PeakList peaks_at(std::initializer_list<Pixel> pixels) {
  PeakList out;
  double v = 1.0;
  for (const Pixel& p : pixels) out.push_back({p, v -= 0.01});
  return out;
}

Mask box_mask(int w, int h, int x0, int y0, int x1, int y1) {
  Mask m(w, h, 0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m(x, y) = 1;
  }
  return m;
}

const KnnModel& small_model() {
  static const KnnModel model = [] {
    std::vector<TrainingSample> samples;
    for (GarmentClass g : {GarmentClass::kShirt, GarmentClass::kTShirt, GarmentClass::kPant}) {
      for (std::uint64_t seed = 300; seed < 304; ++seed) {
        SyntheticSceneSpec spec;
        spec.garment = g;
        spec.seed = seed;
        const SyntheticScene s = generate_scene(spec);
        Contour poly;
        for (const Pixel& p : s.annotation.key_part_polygon) poly.vertices.emplace_back(p.x, p.y);
        samples.push_back({s.depth, poly, s.annotation.key_part_label});
      }
    }
    return train_model(samples, CameraIntrinsics{}, PipelineConfig{}.region).model;
  }();
  return model;
}

SyntheticScene scene(GarmentClass g, std::uint64_t seed) {
  SyntheticSceneSpec spec;
  spec.garment = g;
  spec.seed = seed;
  return generate_scene(spec);
}

}  // namespace

TEST(PointToLine, Examples) {
  EXPECT_DOUBLE_EQ(point_to_line_distance({5, 5}, {0, 0}, {10, 0}), 5.0);
  EXPECT_DOUBLE_EQ(point_to_line_distance({5, 0}, {0, 0}, {10, 0}), 0.0);
  EXPECT_DOUBLE_EQ(point_to_line_distance({20, 3}, {0, 0}, {10, 0}), 3.0);
  EXPECT_DOUBLE_EQ(point_to_line_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
  EXPECT_NEAR(point_to_line_distance({0, 2}, {0, 0}, {2, 2}), std::sqrt(2.0), 1e-12);
}

TEST(ResolveThreshold, FixedAndPercentile) {
  Grid<double> v(10, 1, 0.0);
  for (int x = 0; x < 10; ++x) v(x, 0) = x;
  const Mask valid(10, 1, 1);
  PeakParams p;
  p.threshold = 2.5;
  EXPECT_DOUBLE_EQ(resolve_threshold(p, v, valid), 2.5);
  p.threshold.reset();
  p.percentile = 0.0;
  EXPECT_DOUBLE_EQ(resolve_threshold(p, v, valid), 1.0);
  p.percentile = 1.0;
  EXPECT_DOUBLE_EQ(resolve_threshold(p, v, valid), 9.0);
}

TEST(SelectNeck, PicksPairThroughCenter) {
  const Mask m = box_mask(60, 60, 20, 20, 40, 40);  // center (30, 30)
  const PeakList peaks = peaks_at({{15, 30}, {45, 30}, {15, 16}, {45, 44}, {30, 30}, {2, 2}});
  const PairSelection sel = select_points_neck(m, peaks, 7);
  EXPECT_EQ(sel.status, SelectionStatus::kOk);
  EXPECT_EQ(sel.candidates.size(), 4u);  // inside point and far point dropped
  EXPECT_EQ(sel.point_a, (Pixel{15, 30}));
  EXPECT_EQ(sel.point_b, (Pixel{45, 30}));
  EXPECT_DOUBLE_EQ(sel.score, 0.0);
}

TEST(SelectNeck, EdgeCases) {
  const Mask m = box_mask(60, 60, 20, 20, 40, 40);
  EXPECT_EQ(select_points_neck(m, {}, 7).status, SelectionStatus::kNoCandidates);
  EXPECT_EQ(select_points_neck(m, peaks_at({{30, 30}}), 7).status, SelectionStatus::kNoCandidates);
  const PairSelection one = select_points_neck(m, peaks_at({{30, 15}, {30, 30}}), 7);
  EXPECT_EQ(one.status, SelectionStatus::kSinglePoint);
  EXPECT_EQ(one.point_a, one.point_b);
  EXPECT_DOUBLE_EQ(one.score, 15.0);
}

TEST(SelectWaist, PicksPairNearExtremes) {
  const Mask m = box_mask(80, 40, 10, 15, 70, 20);
  const PeakList peaks = peaks_at({{40, 17}, {68, 19}, {12, 16}, {30, 18}, {5, 5}, {71, 18}, {55, 15}, {20, 20}});
  const PairSelection sel = select_points_waist(m, peaks);
  const oracle::PairResult want = oracle::waist_pair(m, peaks);
  EXPECT_EQ(sel.status, SelectionStatus::kOk);
  EXPECT_EQ(sel.candidates.size(), 6u);
  EXPECT_EQ(want.count, 6u);
  EXPECT_EQ(sel.point_a, want.a);
  EXPECT_EQ(sel.point_b, want.b);
  EXPECT_NEAR(sel.score, want.score, 1e-12);
  EXPECT_TRUE((sel.point_a == Pixel{68, 19} && sel.point_b == Pixel{12, 16}));
}

TEST(SelectWaist, EdgeCases) {
  const Mask m = box_mask(80, 40, 10, 15, 70, 20);
  EXPECT_EQ(select_points_waist(m, peaks_at({{0, 0}})).status, SelectionStatus::kNoCandidates);
  const PairSelection one = select_points_waist(m, peaks_at({{12, 15}}));
  EXPECT_EQ(one.status, SelectionStatus::kSinglePoint);
  const auto [e1, e2] = extreme_points(m);
  EXPECT_DOUBLE_EQ(one.score, std::min(oracle::dist({12, 15}, e1), oracle::dist({12, 15}, e2)));
}

TEST(Selection, RandomFixturesMatchExhaustiveSearch) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> px(0, 59), py(0, 49);
  for (int t = 0; t < 30; ++t) {
    const Mask m = fixture::random_blob(rng, 60, 50, 2);
    PeakList peaks;
    for (int i = 0; i < 25; ++i) peaks.push_back({{px(rng), py(rng)}, 1.0 - 0.01 * i});
    for (int r : {3, 7}) {
      const PairSelection neck = select_points_neck(m, peaks, r);
      const oracle::PairResult want = oracle::neck_pair(m, peaks, r);
      ASSERT_EQ(neck.candidates.size(), want.count);
      if (want.count >= 2) {
        EXPECT_EQ(neck.point_a, want.a);
        EXPECT_EQ(neck.point_b, want.b);
        EXPECT_NEAR(neck.score, want.score, 1e-9);
      }
    }
    const PairSelection waist = select_points_waist(m, peaks);
    const oracle::PairResult want = oracle::waist_pair(m, peaks);
    ASSERT_EQ(waist.candidates.size(), want.count);
    if (want.count >= 2) {
      EXPECT_EQ(waist.point_a, want.a);
      EXPECT_EQ(waist.point_b, want.b);
      EXPECT_NEAR(waist.score, want.score, 1e-9);
    }
  }
}

TEST(Recognition, FlatSceneFindsNothing) {
  const DepthImage flat = fixture::plane_image(640, 480, 1.0f);
  const auto dets = recognize_garment_part(flat, small_model(), PipelineConfig{});
  for (const auto& d : dets) EXPECT_EQ(d.label, GarmentLabel::kNoDetection);
  try {
    detect_grasp_points(flat, small_model(), PipelineConfig{});
    FAIL() << "expected DetectionFailure";
  } catch (const DetectionFailure& e) {
    EXPECT_EQ(e.kind(), DetectionFailure::Kind::kNoKeyPart);
    EXPECT_EQ(e.label(), GarmentLabel::kNoDetection);
  }
}

TEST(Detection, PantUsesWaistRule) {
  const SyntheticScene s = scene(GarmentClass::kPant, 310);
  const GraspResult r = detect_grasp_points(s.depth, small_model(), PipelineConfig{});
  EXPECT_EQ(r.detection.label, GarmentLabel::kWaistPant);
  EXPECT_TRUE(r.detection.mask[r.point_a]);
  EXPECT_TRUE(r.detection.mask[r.point_b]);
  const PairSelection again = select_points_waist(r.detection.mask, r.candidates);
  EXPECT_EQ(again.point_a, r.point_a);
  EXPECT_EQ(again.point_b, r.point_b);
}

TEST(Detection, ShirtUsesNeckRule) {
  const SyntheticScene s = scene(GarmentClass::kShirt, 311);
  const GraspResult r = detect_grasp_points(s.depth, small_model(), PipelineConfig{});
  EXPECT_EQ(r.detection.label, GarmentLabel::kNeckShirt);
  EXPECT_FALSE(r.detection.mask[r.point_a]);
  EXPECT_FALSE(r.detection.mask[r.point_b]);
  const PairSelection again = select_points_neck(r.detection.mask, r.candidates, PipelineConfig{}.dilation_radius);
  EXPECT_EQ(again.point_a, r.point_a);
  EXPECT_EQ(again.point_b, r.point_b);
}

TEST(Detection, Deterministic) {
  const SyntheticScene s = scene(GarmentClass::kTShirt, 312);
  const GraspResult a = detect_grasp_points(s.depth, small_model(), PipelineConfig{});
  const GraspResult b = detect_grasp_points(s.depth, small_model(), PipelineConfig{});
  EXPECT_EQ(a.detection.label, b.detection.label);
  EXPECT_EQ(a.point_a, b.point_a);
  EXPECT_EQ(a.point_b, b.point_b);
  EXPECT_EQ(a.candidates, b.candidates);
  EXPECT_EQ(a.detection.mask, b.detection.mask);
}
