// clothgrasp: train, detect, wrinkle, synth and eval subcommands.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clothgrasp/contours.hpp"
#include "clothgrasp/data_io.hpp"
#include "clothgrasp/descriptors.hpp"
#include "clothgrasp/evaluation.hpp"
#include "clothgrasp/pipeline.hpp"
#include "clothgrasp/synthetic.hpp"
#include "clothgrasp/wrinkle.hpp"

namespace fs = std::filesystem;
using namespace clothgrasp;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNoDetection = 3 };

std::string pixel_text(Pixel p) { return std::to_string(p.x) + " " + std::to_string(p.y); }

std::string scene_depth_path(const std::string& dir, const std::string& id) {
  for (const char* ext : {".pcd", ".pgm"}) {
    const fs::path p = fs::path(dir) / (id + ext);
    if (fs::exists(p)) return p.string();
  }
  throw Error("no depth file for '" + id + "' in " + dir);
}

Contour polygon_contour(const std::vector<Pixel>& poly) {
  Contour c;
  for (const Pixel& p : poly) c.vertices.emplace_back(p.x, p.y);
  return c;
}

// 16-bit image of a map scaled so that `top` maps to 65535.
Grid<std::uint16_t> scaled_map(const Grid<double>& values, double top) {
  Grid<std::uint16_t> out(values.width(), values.height());
  if (!(top > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.data()[i] = static_cast<std::uint16_t>(std::lround(std::clamp(values.data()[i] / top, 0.0, 1.0) * 65535.0));
  }
  return out;
}

// Depth rendered as gray with the key-part mask outline in blue, vesselness
// candidates in red and grasp points in green (binary PPM).
std::string overlay_ppm(const DepthImage& img, const GraspResult& r) {
  const int w = img.width();
  const int h = img.height();
  float lo = std::numeric_limits<float>::max();
  float hi = 0.0f;
  for (float v : img.grid().data()) {
    if (v == DepthImage::kInvalid) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<std::array<std::uint8_t, 3>> rgb(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t g = 0;
      if (img.valid(x, y) && hi > lo) g = static_cast<std::uint8_t>(std::lround(230.0 * (hi - img.at(x, y)) / (hi - lo)) + 25);
      rgb[static_cast<std::size_t>(y) * w + x] = {g, g, g};
    }
  }
  auto paint = [&](Pixel p, int radius, std::array<std::uint8_t, 3> c) {
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        const int x = p.x + dx;
        const int y = p.y + dy;
        if (x >= 0 && y >= 0 && x < w && y < h) rgb[static_cast<std::size_t>(y) * w + x] = c;
      }
    }
  };
  for (const Pixel& p : mask_boundary(r.detection.mask)) paint(p, 0, {40, 90, 255});
  for (const Peak& p : r.candidates) paint(p.pixel, 1, {255, 40, 40});
  paint(r.point_a, 3, {40, 220, 40});
  paint(r.point_b, 3, {40, 220, 40});

  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (const auto& c : rgb) out.append(reinterpret_cast<const char*>(c.data()), 3);
  return out;
}

std::string status_name(SelectionStatus s) {
  switch (s) {
    case SelectionStatus::kOk: return "ok";
    case SelectionStatus::kSinglePoint: return "single_point";
    case SelectionStatus::kNoCandidates: return "no_candidates";
  }
  return "?";
}

int run_train(const std::string& annotations, const std::string& data, const std::string& out) {
  const auto records = load_annotations(annotations);
  std::vector<TrainingSample> samples;
  samples.reserve(records.size());
  for (const AnnotationRecord& r : records) {
    samples.push_back({load_depth(scene_depth_path(data, r.id)), polygon_contour(r.key_part_polygon), r.key_part_label});
  }
  const PipelineConfig cfg;
  const TrainingResult result = train_model(samples, cfg.intrinsics, cfg.region);
  save_model(out, result.model);
  std::cout << "entries " << result.model.entries.size() << "\n";
  std::cout << "skipped " << result.skipped << "\n";
  return kOk;
}

int run_detect(const std::string& model_path, const std::string& input, const std::string& dump_dir) {
  const KnnModel model = load_model(model_path);
  const DepthImage img = load_depth(input);
  const PipelineConfig cfg;
  DetectionMaps maps;
  GraspResult r;
  try {
    r = detect_grasp_points(img, model, cfg, &maps);
  } catch (const DetectionFailure& e) {
    std::cout << "label " << label_name(e.label()) << "\n";
    std::cout << "reason " << (e.kind() == DetectionFailure::Kind::kNoKeyPart ? "no_key_part" : "no_candidates")
              << "\n";
    return kNoDetection;
  }

  const Classification& c = r.detection.classification;
  std::cout << "label " << label_name(r.detection.label) << "\n";
  std::cout << "votes " << c.winner_votes() << "\n";
  std::cout << "distance " << fixed6(c.winner_distance()) << "\n";
  std::cout << "seed " << pixel_text(r.detection.seed_peak) << "\n";
  std::cout << "point_a " << pixel_text(r.point_a) << "\n";
  std::cout << "point_b " << pixel_text(r.point_b) << "\n";
  std::cout << "status " << status_name(r.status) << "\n";
  std::cout << "score " << fixed6(r.selection_score) << "\n";
  std::cout << "candidates " << r.candidates.size() << "\n";
  std::cout << "contour";
  for (const auto& v : r.detection.contour.vertices) std::cout << " " << fixed6(v.x()) << "," << fixed6(v.y());
  std::cout << "\n";

  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    const double max_entropy = 2.0 * std::log2(static_cast<double>(kOrientationBins));
    save_pgm((fs::path(dump_dir) / "entropy.pgm").string(), scaled_map(maps.recognition.entropy.values, max_entropy),
             65535);
    save_pgm((fs::path(dump_dir) / "vesselness.pgm").string(), scaled_map(maps.vesselness.values, 1.0), 65535);
    write_file((fs::path(dump_dir) / "overlay.ppm").string(), overlay_ppm(img, r));
  }
  return kOk;
}

int run_wrinkle(const std::string& input, const std::string& mask_path) {
  const DepthImage img = load_depth(input);
  const Mask mask = mask_from_pgm(read_pgm(mask_path));
  const RoughnessIndex ri = roughness_index(multiscale_vesselness(img, roughness_vesselness_params()), mask);
  std::cout << "mean " << fixed6(ri.mean) << "\n";
  std::cout << "entropy " << fixed6(ri.entropy) << "\n";
  return kOk;
}

int run_synth(GarmentClass garment, std::uint64_t seed, const std::string& out, int count, SyntheticSceneSpec spec) {
  fs::create_directories(out);
  const std::string index = (fs::path(out) / "annotations.txt").string();
  std::vector<AnnotationRecord> records;
  if (fs::exists(index)) records = load_annotations(index);
  spec.garment = garment;
  for (int i = 0; i < count; ++i) {
    spec.seed = seed + static_cast<std::uint64_t>(i);
    const SyntheticScene scene = generate_scene(spec);
    const std::string& id = scene.annotation.id;
    save_pcd((fs::path(out) / (id + ".pcd")).string(), depth_to_cloud(scene.depth, CameraIntrinsics{}),
             PcdEncoding::kBinary);
    save_pgm((fs::path(out) / scene.annotation.garment_mask_path).string(), mask_to_pgm(scene.garment_mask), 255);
    std::erase_if(records, [&](const AnnotationRecord& r) { return r.id == id; });
    records.push_back(scene.annotation);
    std::cout << id << "\n";
  }
  save_annotations(index, records);
  return kOk;
}

int run_eval(const std::string& model_path, const std::string& annotations, const std::string& data,
             const std::string& report_path) {
  const KnnModel model = load_model(model_path);
  const auto records = load_annotations(annotations);
  const PipelineConfig cfg;
  std::vector<DetectionRecord> detections;
  for (const AnnotationRecord& rec : records) {
    const DepthImage img = load_depth(scene_depth_path(data, rec.id));
    DetectionRecord d{rec.id, GarmentLabel::kNoDetection, {}, img.width(), img.height()};
    try {
      const GraspResult r = detect_grasp_points(img, model, cfg);
      d.label = r.detection.label;
      d.points.push_back(r.point_a);
      if (r.status == SelectionStatus::kOk) d.points.push_back(r.point_b);
    } catch (const DetectionFailure& e) {
      d.label = e.label();
    }
    detections.push_back(std::move(d));
  }
  const EvalReport report = evaluate(detections, records);
  write_file(report_path, format_report(report));
  std::cout << format_report_table(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Garment grasp-point detection on depth images"};
  app.require_subcommand(1);

  std::string annotations, data, out, model, input, dump_dir, mask, report, class_name;
  std::uint64_t seed = 0;
  int count = 1;
  SyntheticSceneSpec spec;

  auto* train = app.add_subcommand("train", "Build a k-NN model from annotated scenes");
  train->add_option("--annotations", annotations, "Annotation file")->required()->check(CLI::ExistingFile);
  train->add_option("--data", data, "Directory with <id>.pcd or <id>.pgm depth files")->required();
  train->add_option("--out", out, "Model output path")->required();

  auto* detect = app.add_subcommand("detect", "Detect the key part and two grasp points");
  detect->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
  detect->add_option("--input", input, "Depth input (.pcd or .pgm)")->required()->check(CLI::ExistingFile);
  detect->add_option("--dump-maps", dump_dir, "Write entropy, vesselness and overlay images here");

  auto* wrinkle = app.add_subcommand("wrinkle", "Roughness indices of a garment");
  wrinkle->add_option("--input", input, "Depth input (.pcd or .pgm)")->required()->check(CLI::ExistingFile);
  wrinkle->add_option("--mask", mask, "Garment mask (PGM)")->required()->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Generate synthetic scenes with annotations");
  synth->add_option("--class", class_name, "pant, shirt or tshirt")
      ->required()
      ->check(CLI::IsMember({"pant", "shirt", "tshirt"}));
  synth->add_option("--seed", seed, "First seed")->required();
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--count", count, "Number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--wrinkles", spec.wrinkle_count, "Wrinkles per scene")->check(CLI::NonNegativeNumber);
  synth->add_option("--amplitude", spec.wrinkle_amplitude, "Wrinkle amplitude (m)")->check(CLI::PositiveNumber);
  synth->add_option("--wavelength", spec.wrinkle_wavelength, "Wrinkle wavelength (px)");
  synth->add_option("--table-depth", spec.table_depth, "Table distance (m)")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate a model on annotated scenes");
  eval->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--annotations", annotations, "Annotation file")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data, "Directory with depth files")->required();
  eval->add_option("--report", report, "Report output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*train) return run_train(annotations, data, out);
    if (*detect) return run_detect(model, input, dump_dir);
    if (*wrinkle) return run_wrinkle(input, mask);
    if (*synth) return run_synth(*parse_garment_class(class_name), seed, out, count, spec);
    if (*eval) return run_eval(model, annotations, data, report);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
