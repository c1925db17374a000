#include "clothgrasp/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace clothgrasp {

double resolve_threshold(const PeakParams& p, const Grid<double>& values, const Mask& valid) {
  if (p.threshold) return *p.threshold;
  double top = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid.data()[i]) top = std::max(top, values.data()[i]);
  }
  const double floor = p.noise_floor * top;
  Mask above = valid;
  for (std::size_t i = 0; i < values.size(); ++i) above.data()[i] = valid.data()[i] && values.data()[i] > floor;
  return std::max(nonzero_percentile(values, above, p.percentile), std::nextafter(floor, INFINITY));
}

namespace {

Contour square_window(Pixel c, int side, int width, int height) {
  const int half = side / 2;
  const double x0 = std::max(0, c.x - half);
  const double y0 = std::max(0, c.y - half);
  const double x1 = std::min(width - 1, c.x + half);
  const double y1 = std::min(height - 1, c.y + half);
  return Contour{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// Higher votes first, then the smaller summed distance of the winning label.
bool more_confident(const KeyPartDetection& a, const KeyPartDetection& b) {
  const bool a_nd = a.label == GarmentLabel::kNoDetection;
  const bool b_nd = b.label == GarmentLabel::kNoDetection;
  if (a_nd != b_nd) return b_nd;
  if (a_nd) return false;
  if (a.classification.winner_votes() != b.classification.winner_votes()) {
    return a.classification.winner_votes() > b.classification.winner_votes();
  }
  if (a.classification.winner_distance() != b.classification.winner_distance()) {
    return a.classification.winner_distance() < b.classification.winner_distance();
  }
  return a.label < b.label;
}

}  // namespace

std::vector<KeyPartDetection> recognize_garment_part(const DepthImage& img, const KnnModel& model,
                                                     const PipelineConfig& cfg, RecognitionMaps* maps) {
  if (model.empty()) throw InvalidArgument("recognize_garment_part: untrained model");
  if (img.empty()) throw InvalidArgument("recognize_garment_part: empty image");

  const PointCloud cloud = depth_to_cloud(img, cfg.intrinsics);
  const NormalMap normals = estimate_normals(cloud, cfg.normal_radius);
  EntropyMap entropy = entropy_filter(normals, cfg.entropy_window);
  const double threshold = resolve_threshold(cfg.entropy_peaks, entropy.values, entropy.valid);
  PeakList peaks = find_local_maxima(entropy, cfg.entropy_peaks.radius, threshold);
  if (cfg.max_candidates > 0 && peaks.size() > cfg.max_candidates) peaks.resize(cfg.max_candidates);

  const Grid<double> edges = edge_map(img, cfg.snake.edge_sigma);
  std::vector<KeyPartDetection> all;
  all.reserve(peaks.size());
  for (const Peak& peak : peaks) {
    if (!img.valid(peak.pixel)) continue;
    KeyPartDetection det;
    det.seed_peak = peak.pixel;
    det.contour = evolve_snake(img, edges, peak.pixel, cfg.snake).contour;
    det.mask = contour_to_mask(det.contour, img.width(), img.height());
    if (std::abs(polygon_area(det.contour)) < cfg.min_snake_area || !det.mask[peak.pixel]) {
      det.contour = square_window(peak.pixel, cfg.fallback_window, img.width(), img.height());
      det.mask = contour_to_mask(det.contour, img.width(), img.height());
      det.used_fallback = true;
    }
    det.region_points = region_point_count(img, cfg.intrinsics, det.mask, cfg.region.voxel_leaf);
    if (det.region_points >= cfg.min_region_points) {
      try {
        const RegionDescription region = describe_region(img, cfg.intrinsics, det.mask, cfg.region);
        det.classification = knn_classify(model, region.descriptor, cfg.k, cfg.metric);
        det.label = det.classification.label;
      } catch (const DegenerateRegion&) {
        det.label = GarmentLabel::kNoDetection;
      }
    }
    all.push_back(std::move(det));
  }

  // Per label keep the strongest detection; NoDetection keeps its first entry.
  std::array<std::optional<std::size_t>, kLabelCount> best;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& slot = best[static_cast<std::size_t>(all[i].label)];
    if (!slot || (all[i].label != GarmentLabel::kNoDetection && more_confident(all[i], all[*slot]))) slot = i;
  }
  std::vector<KeyPartDetection> kept;
  for (const auto& slot : best) {
    if (slot) kept.push_back(all[*slot]);
  }
  std::stable_sort(kept.begin(), kept.end(), more_confident);

  if (maps) {
    maps->entropy = std::move(entropy);
    maps->entropy_peaks = std::move(peaks);
  }
  return kept;
}

double point_to_line_distance(Pixel p, Pixel a, Pixel b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  return std::abs(dx * (p.y - a.y) - dy * (p.x - a.x)) / len;
}

namespace {

double pixel_distance(Pixel a, Pixel b) { return std::hypot(a.x - b.x, a.y - b.y); }

template <class Score>
PairSelection best_pair(std::vector<Pixel> candidates, Score score) {
  PairSelection sel;
  sel.candidates = std::move(candidates);
  const auto& c = sel.candidates;
  if (c.empty()) return sel;
  if (c.size() == 1) {
    sel.status = SelectionStatus::kSinglePoint;
    sel.point_a = sel.point_b = c.front();
    return sel;
  }
  sel.status = SelectionStatus::kOk;
  bool first = true;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double s = score(c[i], c[j]);
      if (first || s < sel.score) {
        sel.score = s;
        sel.point_a = c[i];
        sel.point_b = c[j];
        first = false;
      }
    }
  }
  return sel;
}

}  // namespace

PairSelection select_points_neck(const Mask& mask, const PeakList& peaks, int dilation_radius) {
  const Pixel center = mask_center(mask);
  const Mask ring = dilate_mask(mask, dilation_radius);
  std::vector<Pixel> candidates;
  for (const Peak& p : peaks) {
    if (mask.contains(p.pixel) && ring[p.pixel] && !mask[p.pixel]) candidates.push_back(p.pixel);
  }
  PairSelection sel = best_pair(std::move(candidates),
                                [&](Pixel a, Pixel b) { return point_to_line_distance(center, a, b); });
  if (sel.status == SelectionStatus::kSinglePoint) sel.score = pixel_distance(center, sel.point_a);
  return sel;
}

PairSelection select_points_waist(const Mask& mask, const PeakList& peaks) {
  const auto [pe1, pe2] = extreme_points(mask);
  std::vector<Pixel> candidates;
  for (const Peak& p : peaks) {
    if (mask.contains(p.pixel) && mask[p.pixel]) candidates.push_back(p.pixel);
  }
  PairSelection sel = best_pair(std::move(candidates), [&, pe1 = pe1, pe2 = pe2](Pixel a, Pixel b) {
    const double d1 = pixel_distance(a, pe1) + pixel_distance(b, pe2);
    const double d2 = pixel_distance(a, pe2) + pixel_distance(b, pe1);
    return std::min(d1, d2);
  });
  if (sel.status == SelectionStatus::kSinglePoint) {
    sel.score = std::min(pixel_distance(sel.point_a, pe1), pixel_distance(sel.point_a, pe2));
  }
  return sel;
}

GraspResult detect_grasp_points(const DepthImage& img, const KnnModel& model, const PipelineConfig& cfg,
                                DetectionMaps* maps) {
  std::vector<KeyPartDetection> detections =
      recognize_garment_part(img, model, cfg, maps ? &maps->recognition : nullptr);
  if (detections.empty() || detections.front().label == GarmentLabel::kNoDetection) {
    throw DetectionFailure(DetectionFailure::Kind::kNoKeyPart, "no garment key part recognized");
  }

  VesselnessMap vessel = multiscale_vesselness(img, cfg.vesselness);
  const double threshold = resolve_threshold(cfg.vessel_peaks, vessel.values, vessel.valid);
  PeakList peaks = find_local_maxima(vessel, cfg.vessel_peaks.radius, threshold);

  GraspResult result;
  result.detection = std::move(detections.front());
  result.other_detections.assign(std::make_move_iterator(detections.begin() + 1),
                                 std::make_move_iterator(detections.end()));

  PairSelection sel;
  switch (result.detection.label) {
    case GarmentLabel::kNeckShirt:
    case GarmentLabel::kNeckTShirt:
      sel = select_points_neck(result.detection.mask, peaks, cfg.dilation_radius);
      break;
    case GarmentLabel::kWaistPant:
      sel = select_points_waist(result.detection.mask, peaks);
      break;
    case GarmentLabel::kNoDetection:
      throw DetectionFailure(DetectionFailure::Kind::kNoKeyPart, "no garment key part recognized");
  }
  if (sel.status == SelectionStatus::kNoCandidates) {
    throw DetectionFailure(DetectionFailure::Kind::kNoCandidates, "no grasp candidates near the key part",
                           result.detection.label);
  }

  result.point_a = sel.point_a;
  result.point_b = sel.point_b;
  result.status = sel.status;
  result.selection_score = sel.score;
  result.candidates = std::move(peaks);
  if (maps) maps->vesselness = std::move(vessel);
  return result;
}

}  // namespace clothgrasp
