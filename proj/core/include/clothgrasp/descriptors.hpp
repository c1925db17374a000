#pragma once

// Viewpoint feature histograms of local regions and k-nearest-neighbour
// recognition of garment key parts.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clothgrasp/contours.hpp"
#include "clothgrasp/geometry.hpp"

namespace clothgrasp {

/// Garment key-part classes; NoDetection marks a failed recognition.
enum class GarmentLabel { kNeckShirt = 0, kNeckTShirt = 1, kWaistPant = 2, kNoDetection = 3 };

inline constexpr std::size_t kLabelCount = 4;
inline constexpr std::array<GarmentLabel, 3> kKeyPartLabels{GarmentLabel::kNeckShirt, GarmentLabel::kNeckTShirt,
                                                            GarmentLabel::kWaistPant};

/// Full name used in model and annotation files ("NeckShirt", ...).
std::string_view label_name(GarmentLabel label);
/// Short table code ("NS", "NTS", "W", "ND").
std::string_view label_code(GarmentLabel label);
/// Accepts either the full name or the short code.
std::optional<GarmentLabel> parse_label(std::string_view text);

/// 308-bin compound histogram: alpha, phi, theta and centroid-distance
/// blocks of 45 bins followed by a 128-bin viewpoint block.
struct VFHDescriptor {
  static constexpr std::size_t kShapeBins = 45;
  static constexpr std::size_t kViewpointBins = 128;
  static constexpr std::size_t kSize = 4 * kShapeBins + kViewpointBins;
  static constexpr std::size_t kBlockCount = 5;

  std::array<double, kSize> bins{};

  /// [begin, end) bin range of block b (0..4).
  static std::pair<std::size_t, std::size_t> block(std::size_t b);
  double block_sum(std::size_t b) const;

  friend bool operator==(const VFHDescriptor&, const VFHDescriptor&) = default;
};

/// Builds the descriptor of a region from its valid points and normals.
/// Shape angles are taken per point against the centroid and its mean
/// normal; the viewpoint block bins the angle between each normal and the
/// unit vector from the viewpoint to the centroid. Each block sums to 1.
/// Throws DegenerateRegion with fewer than two usable points.
VFHDescriptor compute_vfh(const PointCloud& cloud, const NormalMap& normals, const Eigen::Vector3d& viewpoint);

enum class DescriptorMetric { kChiSquare, kEuclidean };

double descriptor_distance(const VFHDescriptor& a, const VFHDescriptor& b, DescriptorMetric metric);

struct RegionParams {
  double voxel_leaf = 0.005;     ///< meters
  double normal_radius = 0.02;  ///< meters
};

struct KnnModel {
  struct Entry {
    VFHDescriptor descriptor;
    GarmentLabel label = GarmentLabel::kNeckShirt;
  };
  struct Metadata {
    RegionParams region;
    std::string created;  ///< ISO-8601 UTC; not persisted
  };

  std::vector<Entry> entries;
  Metadata metadata;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
};

struct Neighbour {
  std::size_t index = 0;
  double distance = 0.0;
  GarmentLabel label = GarmentLabel::kNeckShirt;
};

struct Classification {
  GarmentLabel label = GarmentLabel::kNoDetection;
  std::array<int, kLabelCount> votes{};
  std::array<double, kLabelCount> summed_distance{};
  std::vector<Neighbour> neighbours;

  int winner_votes() const { return votes[static_cast<std::size_t>(label)]; }
  double winner_distance() const { return summed_distance[static_cast<std::size_t>(label)]; }
};

/// Plurality vote among the k nearest entries (k capped at the model size;
/// equal distances keep the lower entry index). Vote ties go to the tied
/// label with the smallest summed neighbour distance, then to the
/// lexicographically smallest label name.
Classification knn_classify(const KnnModel& model, const VFHDescriptor& d, int k = 10,
                            DescriptorMetric metric = DescriptorMetric::kChiSquare);

/// Descriptor of the depth pixels under `region`: back-projection,
/// voxel downsampling, normal estimation and compute_vfh.
struct RegionDescription {
  VFHDescriptor descriptor;
  std::size_t points = 0;  ///< after voxel downsampling
};
RegionDescription describe_region(const DepthImage& img, const CameraIntrinsics& k, const Mask& region,
                                  const RegionParams& params);

/// Number of points left after back-projecting and voxel-downsampling a region.
std::size_t region_point_count(const DepthImage& img, const CameraIntrinsics& k, const Mask& region, double leaf);

struct TrainingSample {
  DepthImage image;
  Contour polygon;
  GarmentLabel label = GarmentLabel::kNeckShirt;
};

struct TrainingResult {
  KnnModel model;
  std::size_t skipped = 0;
};

/// One model entry per usable sample; samples whose region is degenerate are
/// skipped and counted. Throws InvalidArgument when no sample is usable.
TrainingResult train_model(const std::vector<TrainingSample>& samples, const CameraIntrinsics& k,
                           const RegionParams& params = {});

/// Model file: "vfh-knn v1 <count>" then one "<label> <b0> ... <b307>" line per entry.
void write_model(std::ostream& out, const KnnModel& model);
KnnModel read_model(std::istream& in);
void save_model(const std::string& path, const KnnModel& model);
KnnModel load_model(const std::string& path);

}  // namespace clothgrasp
