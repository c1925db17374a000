#pragma once

// Key-part recognition followed by class-specific grasp-point selection.

#include <optional>
#include <vector>

#include "clothgrasp/contours.hpp"
#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/geometry.hpp"
#include "clothgrasp/wrinkle.hpp"

namespace clothgrasp {

struct PeakParams {
  int radius = 11;
  /// Fixed response threshold; when unset, `percentile` of the nonzero responses.
  std::optional<double> threshold;
  double percentile = 0.6;
  /// Responses at or below this fraction of the map maximum count as zero
  /// (round-off on flat or tilted planes).
  double noise_floor = 1e-3;
};

struct PipelineConfig {
  CameraIntrinsics intrinsics;
  double normal_radius = 0.02;  ///< meters, for the image-wide normal map
  int entropy_window = 21;
  PeakParams entropy_peaks;
  /// Upper bound on entropy peaks turned into candidate regions (0 = all).
  std::size_t max_candidates = 0;
  /// A stronger edge pull than the bare snake default so the contour settles on the wall of a key part.
  SnakeParams snake{.kappa = 10.0};
  int fallback_window = 61;
  double min_snake_area = 3.0;  ///< px^2; smaller contours use the fallback window
  RegionParams region{0.005, 0.0125};
  std::size_t min_region_points = 50;
  int k = 10;
  DescriptorMetric metric = DescriptorMetric::kChiSquare;
  VesselnessParams vesselness;
  /// Keeps ridge-like folds and seams, drops the broad curvature around rims.
  PeakParams vessel_peaks{11, std::nullopt, 0.8};
  int dilation_radius = 7;
};

/// The fixed threshold if set, else the configured percentile of the responses above the noise floor.
double resolve_threshold(const PeakParams& p, const Grid<double>& values, const Mask& valid);

struct KeyPartDetection {
  GarmentLabel label = GarmentLabel::kNoDetection;
  Contour contour;
  Mask mask;
  Pixel seed_peak;
  Classification classification;
  std::size_t region_points = 0;
  bool used_fallback = false;
};

/// Maps used along the way, kept for inspection.
struct RecognitionMaps {
  EntropyMap entropy;
  PeakList entropy_peaks;
};

/// Key-part recognition: entropy peaks seed active contours whose regions
/// are described and classified; per label the strongest detection is kept.
/// Regions too sparse after voxel filtering yield NoDetection entries.
/// Result is sorted by confidence (votes, then smaller summed distance),
/// with NoDetection last.
std::vector<KeyPartDetection> recognize_garment_part(const DepthImage& img, const KnnModel& model,
                                                     const PipelineConfig& cfg, RecognitionMaps* maps = nullptr);

/// Perpendicular distance from p to the line through a and b (|p - a| if a == b).
double point_to_line_distance(Pixel p, Pixel a, Pixel b);

enum class SelectionStatus { kOk, kSinglePoint, kNoCandidates };

struct PairSelection {
  SelectionStatus status = SelectionStatus::kNoCandidates;
  Pixel point_a;
  Pixel point_b;
  double score = 0.0;
  std::vector<Pixel> candidates;
};

/// Neck rule: among peaks in the dilation ring around the mask, the pair
/// whose connecting line passes closest to the mask center.
PairSelection select_points_neck(const Mask& mask, const PeakList& peaks, int dilation_radius);

/// Waist rule: among peaks inside the mask, the pair closest (summed
/// distance, either assignment) to the mask's extreme points.
PairSelection select_points_waist(const Mask& mask, const PeakList& peaks);

struct GraspResult {
  KeyPartDetection detection;
  std::vector<KeyPartDetection> other_detections;
  Pixel point_a;
  Pixel point_b;
  SelectionStatus status = SelectionStatus::kOk;
  PeakList candidates;
  double selection_score = 0.0;
};

class DetectionFailure : public Error {
 public:
  enum class Kind { kNoKeyPart, kNoCandidates };
  DetectionFailure(Kind kind, const std::string& what, GarmentLabel label = GarmentLabel::kNoDetection)
      : Error(what), kind_(kind), label_(label) {}
  Kind kind() const noexcept { return kind_; }
  /// Recognized key part (NoDetection for kNoKeyPart).
  GarmentLabel label() const noexcept { return label_; }

 private:
  Kind kind_;
  GarmentLabel label_;
};

struct DetectionMaps {
  RecognitionMaps recognition;
  VesselnessMap vesselness;
};

/// Full detection. Neck labels use select_points_neck, the waist label
/// select_points_waist. Throws DetectionFailure when no key part is found or
/// no grasp candidate survives filtering.
GraspResult detect_grasp_points(const DepthImage& img, const KnnModel& model, const PipelineConfig& cfg,
                                DetectionMaps* maps = nullptr);

}  // namespace clothgrasp
