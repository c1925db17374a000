#pragma once

// Grasp-point evaluation: square IoU regions around points, point matching,
// per-class aggregation and the key-part confusion matrix.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clothgrasp/data_io.hpp"
#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp {

inline constexpr int kDefaultRectSide = 51;

/// Axis-aligned square centered on a pixel. For even sides the extra pixel
/// goes to the right/bottom.
struct Rect {
  Pixel center;
  int side = kDefaultRectSide;
};

/// Inclusive pixel bounds of a rect clipped to a width x height image.
struct PixelBox {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  long long area() const noexcept {
    return x1 < x0 || y1 < y0 ? 0 : static_cast<long long>(x1 - x0 + 1) * (y1 - y0 + 1);
  }
};

PixelBox clip_rect(const Rect& r, int width, int height);

/// Intersection over union of pixel areas after clipping; 0 when the union is empty.
double iou(const Rect& a, const Rect& b, int width, int height);

struct PointMatch {
  /// IoU per truth point (0 when the point is unmatched).
  std::vector<double> truth_iou;
  /// Detected index assigned to each truth point, if any.
  std::vector<std::optional<std::size_t>> assignment;
  double best_iou = 0.0;
  double mean_iou = 0.0;
};

/// Assignment between detected and truth points maximizing the summed IoU.
/// Throws InvalidArgument without truth points or with more than two on either side.
PointMatch match_points(const std::vector<Pixel>& detected, const std::vector<Pixel>& truth, int width,
                        int height, int side = kDefaultRectSide);

class ConfusionMatrix {
 public:
  void add(GarmentLabel truth, GarmentLabel predicted);
  long long count(GarmentLabel truth, GarmentLabel predicted) const;
  long long row_total(GarmentLabel truth) const;
  /// Row-normalized percentages; empty rows are all zero.
  std::array<std::array<double, kLabelCount>, kLabelCount> percentages() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::array<long long, kLabelCount>, kLabelCount> counts_{};
};

/// Output of the detector for one image. A failed detection has label
/// NoDetection and no points.
struct DetectionRecord {
  std::string id;
  GarmentLabel label = GarmentLabel::kNoDetection;
  std::vector<Pixel> points;
  int width = 640;
  int height = 480;
};

struct ImageDiagnostics {
  std::string id;
  GarmentLabel truth = GarmentLabel::kNeckShirt;
  GarmentLabel predicted = GarmentLabel::kNoDetection;
  std::vector<double> truth_iou;
  double best_iou = 0.0;
  double mean_iou = 0.0;
  int correct_points = 0;
};

struct ClassStats {
  int images = 0;  ///< images of this truth class with at least one truth point
  double mean_iou = 0.0;
  double best_iou = 0.0;
  double recall_1 = 0.0;  ///< percent of images with >= 1 correct point
  double recall_2 = 0.0;  ///< percent of images with 2 correct points
};

struct EvalReport {
  std::array<ClassStats, 3> per_class;  ///< indexed like kKeyPartLabels
  ConfusionMatrix confusion;
  std::vector<ImageDiagnostics> images;

  const ClassStats& stats(GarmentLabel label) const;
};

inline constexpr double kCorrectIou = 0.5;

/// Aggregates match_points per truth class; a point is correct when its IoU
/// exceeds 0.5. Lists must be aligned by id (InvalidArgument otherwise).
EvalReport evaluate(const std::vector<DetectionRecord>& detections, const std::vector<AnnotationRecord>& annotations,
                    int side = kDefaultRectSide);

/// Machine-readable report, fixed 6-decimal numbers.
std::string format_report(const EvalReport& report);
/// Human-readable tables.
std::string format_report_table(const EvalReport& report);

/// Fixed-point text with six decimals.
std::string fixed6(double v);

}  // namespace clothgrasp
