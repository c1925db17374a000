#include "clothgrasp/descriptors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Geometry>

namespace clothgrasp {

std::string_view label_name(GarmentLabel label) {
  switch (label) {
    case GarmentLabel::kNeckShirt: return "NeckShirt";
    case GarmentLabel::kNeckTShirt: return "NeckTShirt";
    case GarmentLabel::kWaistPant: return "WaistPant";
    case GarmentLabel::kNoDetection: return "NoDetection";
  }
  return "NoDetection";
}

std::string_view label_code(GarmentLabel label) {
  switch (label) {
    case GarmentLabel::kNeckShirt: return "NS";
    case GarmentLabel::kNeckTShirt: return "NTS";
    case GarmentLabel::kWaistPant: return "W";
    case GarmentLabel::kNoDetection: return "ND";
  }
  return "ND";
}

std::optional<GarmentLabel> parse_label(std::string_view text) {
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    const auto l = static_cast<GarmentLabel>(i);
    if (text == label_name(l) || text == label_code(l)) return l;
  }
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> VFHDescriptor::block(std::size_t b) {
  if (b < 4) return {b * kShapeBins, (b + 1) * kShapeBins};
  return {4 * kShapeBins, kSize};
}

double VFHDescriptor::block_sum(std::size_t b) const {
  const auto [lo, hi] = block(b);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += bins[i];
  return s;
}

namespace {

struct Oriented {
  Eigen::Vector3d p;
  Eigen::Vector3d n;
};

int bin_of(double value, double lo, double hi, std::size_t nbins) {
  const int b = static_cast<int>(std::floor((value - lo) / (hi - lo) * static_cast<double>(nbins)));
  return std::clamp(b, 0, static_cast<int>(nbins) - 1);
}

// Darboux-frame angles between a source (p1, n1) and target (p2, n2); the
// source is the one whose normal is closer to the connecting line.
bool pair_features(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1, const Eigen::Vector3d& p2,
                   const Eigen::Vector3d& n2, double& theta, double& alpha, double& phi) {
  Eigen::Vector3d dp = p2 - p1;
  const double dist = dp.norm();
  if (dist == 0.0) return false;
  dp /= dist;
  Eigen::Vector3d src = n1;
  Eigen::Vector3d dst = n2;
  const double a1 = n1.dot(dp);
  const double a2 = n2.dot(dp);
  if (std::acos(std::min(1.0, std::abs(a1))) > std::acos(std::min(1.0, std::abs(a2)))) {
    std::swap(src, dst);
    dp = -dp;
    phi = -a2;
  } else {
    phi = a1;
  }
  Eigen::Vector3d v = dp.cross(src);
  const double vn = v.norm();
  if (vn == 0.0) return false;
  v /= vn;
  const Eigen::Vector3d w = src.cross(v);
  alpha = v.dot(dst);
  theta = std::atan2(w.dot(dst), src.dot(dst));
  return true;
}

}  // namespace

VFHDescriptor compute_vfh(const PointCloud& cloud, const NormalMap& normals, const Eigen::Vector3d& viewpoint) {
  if (normals.size() != cloud.size()) throw InvalidArgument("compute_vfh: normals do not match cloud");
  std::vector<Oriented> pts;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.valid[i] && normals.valid[i]) pts.push_back({cloud.points[i], normals.normals[i]});
  }
  if (pts.size() < 2) throw DegenerateRegion("compute_vfh: fewer than two valid points with normals");

  // Canonical order so every sum below is independent of the input order.
  std::sort(pts.begin(), pts.end(), [](const Oriented& a, const Oriented& b) {
    for (int k = 0; k < 3; ++k) {
      if (a.p[k] != b.p[k]) return a.p[k] < b.p[k];
    }
    for (int k = 0; k < 3; ++k) {
      if (a.n[k] != b.n[k]) return a.n[k] < b.n[k];
    }
    return false;
  });

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_normal = Eigen::Vector3d::Zero();
  for (const auto& o : pts) {
    centroid += o.p;
    mean_normal += o.n;
  }
  centroid /= static_cast<double>(pts.size());
  if (!(mean_normal.norm() > 0.0)) throw DegenerateRegion("compute_vfh: normals cancel out");
  mean_normal.normalize();

  double max_dist = 0.0;
  for (const auto& o : pts) max_dist = std::max(max_dist, (o.p - centroid).norm());

  constexpr std::size_t kS = VFHDescriptor::kShapeBins;
  VFHDescriptor d;
  std::size_t shape_count = 0;
  std::size_t dist_count = 0;
  for (const auto& o : pts) {
    double theta = 0.0, alpha = 0.0, phi = 0.0;
    if (pair_features(centroid, mean_normal, o.p, o.n, theta, alpha, phi)) {
      d.bins[0 * kS + bin_of(alpha, -1.0, 1.0, kS)] += 1.0;
      d.bins[1 * kS + bin_of(phi, -1.0, 1.0, kS)] += 1.0;
      d.bins[2 * kS + bin_of(theta, -std::numbers::pi, std::numbers::pi, kS)] += 1.0;
      ++shape_count;
    }
    if (max_dist > 0.0) {
      d.bins[3 * kS + bin_of((o.p - centroid).norm() / max_dist, 0.0, 1.0, kS)] += 1.0;
      ++dist_count;
    }
  }

  std::size_t view_count = 0;
  const Eigen::Vector3d ray = centroid - viewpoint;
  if (ray.norm() > 0.0) {
    const Eigen::Vector3d u = ray.normalized();
    for (const auto& o : pts) {
      const double angle = std::acos(std::clamp(o.n.dot(u), -1.0, 1.0));
      d.bins[4 * kS + bin_of(angle, 0.0, std::numbers::pi, VFHDescriptor::kViewpointBins)] += 1.0;
      ++view_count;
    }
  }

  const std::array<std::size_t, 5> counts{shape_count, shape_count, shape_count, dist_count, view_count};
  for (std::size_t b = 0; b < VFHDescriptor::kBlockCount; ++b) {
    if (counts[b] == 0) continue;
    const auto [lo, hi] = VFHDescriptor::block(b);
    for (std::size_t i = lo; i < hi; ++i) d.bins[i] /= static_cast<double>(counts[b]);
  }
  return d;
}

double descriptor_distance(const VFHDescriptor& a, const VFHDescriptor& b, DescriptorMetric metric) {
  double acc = 0.0;
  if (metric == DescriptorMetric::kChiSquare) {
    for (std::size_t i = 0; i < VFHDescriptor::kSize; ++i) {
      const double s = a.bins[i] + b.bins[i];
      if (s > 0.0) {
        const double diff = a.bins[i] - b.bins[i];
        acc += diff * diff / s;
      }
    }
    return acc;
  }
  for (std::size_t i = 0; i < VFHDescriptor::kSize; ++i) {
    const double diff = a.bins[i] - b.bins[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

Classification knn_classify(const KnnModel& model, const VFHDescriptor& d, int k, DescriptorMetric metric) {
  if (model.empty()) throw InvalidArgument("knn_classify: empty model");
  if (k < 1) throw InvalidArgument("knn_classify: k must be >= 1");

  std::vector<Neighbour> all(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    all[i] = {i, descriptor_distance(model.entries[i].descriptor, d, metric), model.entries[i].label};
  }
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk), all.end(),
                    [](const Neighbour& a, const Neighbour& b) {
                      return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
                    });

  Classification c;
  c.neighbours.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk));
  for (const auto& n : c.neighbours) {
    const auto li = static_cast<std::size_t>(n.label);
    ++c.votes[li];
    c.summed_distance[li] += n.distance;
  }

  // Label enum order matches lexicographic order of the label names.
  std::size_t best = kLabelCount;
  for (std::size_t li = 0; li < kLabelCount; ++li) {
    if (c.votes[li] == 0) continue;
    if (best == kLabelCount || c.votes[li] > c.votes[best] ||
        (c.votes[li] == c.votes[best] && c.summed_distance[li] < c.summed_distance[best])) {
      best = li;
    }
  }
  c.label = static_cast<GarmentLabel>(best);
  return c;
}

std::size_t region_point_count(const DepthImage& img, const CameraIntrinsics& k, const Mask& region, double leaf) {
  return voxel_downsample(depth_to_cloud(img, k, region), leaf).size();
}

RegionDescription describe_region(const DepthImage& img, const CameraIntrinsics& k, const Mask& region,
                                  const RegionParams& params) {
  const PointCloud sparse = voxel_downsample(depth_to_cloud(img, k, region), params.voxel_leaf);
  if (sparse.size() < 2) throw DegenerateRegion("describe_region: region has fewer than two points");
  const NormalMap normals = estimate_normals(sparse, params.normal_radius);
  return {compute_vfh(sparse, normals, sparse.viewpoint), sparse.size()};
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

TrainingResult train_model(const std::vector<TrainingSample>& samples, const CameraIntrinsics& k,
                           const RegionParams& params) {
  TrainingResult result;
  result.model.metadata = {params, utc_now()};
  for (const auto& s : samples) {
    if (s.label == GarmentLabel::kNoDetection) {
      throw InvalidArgument("train_model: NoDetection is not a trainable label");
    }
    try {
      const Mask region = contour_to_mask(s.polygon, s.image.width(), s.image.height());
      result.model.entries.push_back({describe_region(s.image, k, region, params).descriptor, s.label});
    } catch (const DegenerateRegion&) {
      ++result.skipped;
    }
  }
  if (result.model.empty()) throw InvalidArgument("train_model: no usable samples");
  return result;
}

void write_model(std::ostream& out, const KnnModel& model) {
  out << "vfh-knn v1 " << model.size() << '\n';
  char buf[64];
  for (const auto& e : model.entries) {
    out << label_name(e.label);
    for (double v : e.descriptor.bins) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

KnnModel read_model(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw SchemaError(lineno, "missing 'vfh-knn v1' header");
  std::istringstream header(line);
  std::string magic, version;
  long long count = -1;
  if (!(header >> magic >> version >> count) || magic != "vfh-knn" || version != "v1" || count < 0) {
    throw SchemaError(lineno, "expected header 'vfh-knn v1 <entry-count>'");
  }

  KnnModel model;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    const auto label = parse_label(token);
    if (!label || *label == GarmentLabel::kNoDetection) throw SchemaError(lineno, "unknown label '" + token + "'");
    KnnModel::Entry entry;
    entry.label = *label;
    std::size_t n = 0;
    while (ss >> token) {
      double v = 0.0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v) || v < 0.0) {
        throw SchemaError(lineno, "bad bin value '" + token + "'");
      }
      if (n < VFHDescriptor::kSize) entry.descriptor.bins[n] = v;
      ++n;
    }
    if (n != VFHDescriptor::kSize) {
      throw SchemaError(lineno, "expected " + std::to_string(VFHDescriptor::kSize) + " bins, got " + std::to_string(n));
    }
    model.entries.push_back(entry);
  }
  if (model.entries.size() != static_cast<std::size_t>(count)) {
    throw SchemaError(lineno, "header declares " + std::to_string(count) + " entries, found " +
                                  std::to_string(model.entries.size()));
  }
  return model;
}

void save_model(const std::string& path, const KnnModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_model(out, model);
  if (!out) throw Error("failed writing '" + path + "'");
}

KnnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace clothgrasp
