#pragma once

// Procedural depth scenes of a single garment lying on a table, with the
// key-part annotation and garment mask needed for training and evaluation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "clothgrasp/data_io.hpp"
#include "clothgrasp/geometry.hpp"

namespace clothgrasp {

enum class GarmentClass { kPant, kShirt, kTShirt };

std::string_view garment_class_name(GarmentClass c);  ///< "pant", "shirt", "tshirt"
std::optional<GarmentClass> parse_garment_class(std::string_view text);
/// WaistPant for pants, NeckShirt / NeckTShirt otherwise.
GarmentLabel key_part_label(GarmentClass c);

struct SyntheticSceneSpec {
  GarmentClass garment = GarmentClass::kShirt;
  double table_depth = 1.0;         ///< meters along the optical axis at the image center
  int wrinkle_count = 6;
  double wrinkle_amplitude = 0.006;  ///< meters
  double wrinkle_wavelength = 14.0;  ///< pixels
  std::uint64_t seed = 0;
  int width = 640;
  int height = 480;

  void validate() const;
};

struct SyntheticScene {
  DepthImage depth;
  AnnotationRecord annotation;
  Mask garment_mask;
};

/// Deterministic in `spec`. The annotation id is "<class>-<seed>" and the
/// mask path "<id>_mask.pgm".
SyntheticScene generate_scene(const SyntheticSceneSpec& spec);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; unlike
/// the standard distributions this is identical across library vendors.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace clothgrasp
