#pragma once

// File formats: PCD 0.7 point clouds, 8/16-bit binary PGM images and the
// line-oriented grasp annotation records.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/geometry.hpp"
#include "clothgrasp/grid.hpp"

namespace clothgrasp {

class PcdError : public Error {
 public:
  enum class Kind {
    kMalformedHeader,
    kUnsupportedVersion,
    kUnsupportedDataMode,
    kFieldMismatch,
    kTruncated,
  };

  PcdError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  /// Byte offset into the input where the problem was detected.
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

std::string_view pcd_error_name(PcdError::Kind kind);

enum class PcdEncoding { kAscii, kBinary };

/// Parses PCD 0.7 with DATA ascii or binary. Clouds with HEIGHT > 1 are
/// organized; NaN coordinates become invalid points.
PointCloud parse_pcd(std::string_view bytes);
PointCloud read_pcd(const std::string& path);

/// Serializes x/y/z as float32; invalid points are written as NaN.
std::string write_pcd(const PointCloud& cloud, PcdEncoding encoding);
void save_pcd(const std::string& path, const PointCloud& cloud, PcdEncoding encoding);

/// Per-pixel z of an organized cloud; invalid points map to the sentinel.
DepthImage cloud_to_depth(const PointCloud& cloud);

/// Binary PGM (P5), maxval up to 65535 (big-endian samples above 255).
Grid<std::uint16_t> parse_pgm(std::string_view bytes);
Grid<std::uint16_t> read_pgm(const std::string& path);
std::string write_pgm(const Grid<std::uint16_t>& img, std::uint16_t maxval);
void save_pgm(const std::string& path, const Grid<std::uint16_t>& img, std::uint16_t maxval);

/// 16-bit depth in millimeters, 0 = missing.
DepthImage depth_from_pgm(const Grid<std::uint16_t>& mm);
Grid<std::uint16_t> depth_to_pgm(const DepthImage& depth);

/// Mask from any grayscale image (nonzero = set) and back to 0/255.
Mask mask_from_pgm(const Grid<std::uint16_t>& img);
Grid<std::uint16_t> mask_to_pgm(const Mask& mask);

/// Loads a depth image from .pcd (organized) or .pgm (millimeters).
DepthImage load_depth(const std::string& path);

struct AnnotationRecord {
  std::string id;
  GarmentLabel key_part_label = GarmentLabel::kNeckShirt;
  std::vector<Pixel> key_part_polygon;
  std::vector<Pixel> grasp_points;
  std::string garment_mask_path;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// "grasp-annot v1" header, then one record per line:
///   id | label | x0,y0 x1,y1 ... | gx0,gy0[;gx1,gy1] | maskpath
std::vector<AnnotationRecord> parse_annotations(std::string_view text);
std::string format_annotations(const std::vector<AnnotationRecord>& records);
std::vector<AnnotationRecord> load_annotations(const std::string& path);
void save_annotations(const std::string& path, const std::vector<AnnotationRecord>& records);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace clothgrasp
