#include "clothgrasp/evaluation.hpp"

#include <algorithm>
#include <cstdio>

namespace clothgrasp {

PixelBox clip_rect(const Rect& r, int width, int height) {
  if (r.side < 1) throw InvalidArgument("rect side must be >= 1");
  PixelBox b;
  b.x0 = std::max(0, r.center.x - (r.side - 1) / 2);
  b.y0 = std::max(0, r.center.y - (r.side - 1) / 2);
  b.x1 = std::min(width - 1, r.center.x + r.side / 2);
  b.y1 = std::min(height - 1, r.center.y + r.side / 2);
  return b;
}

double iou(const Rect& a, const Rect& b, int width, int height) {
  const PixelBox ba = clip_rect(a, width, height);
  const PixelBox bb = clip_rect(b, width, height);
  const PixelBox inter{std::max(ba.x0, bb.x0), std::max(ba.y0, bb.y0), std::min(ba.x1, bb.x1),
                       std::min(ba.y1, bb.y1)};
  const long long i = inter.area();
  const long long u = ba.area() + bb.area() - i;
  return u == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(u);
}

PointMatch match_points(const std::vector<Pixel>& detected, const std::vector<Pixel>& truth, int width, int height,
                        int side) {
  if (truth.empty()) throw InvalidArgument("match_points: no truth points");
  if (truth.size() > 2 || detected.size() > 2) throw InvalidArgument("match_points: at most two points per side");

  const std::size_t t = truth.size();
  std::vector<std::vector<double>> table(t, std::vector<double>(detected.size()));
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < detected.size(); ++j) {
      table[i][j] = iou(Rect{truth[i], side}, Rect{detected[j], side}, width, height);
    }
  }

  PointMatch best;
  double best_sum = -1.0;
  std::vector<std::optional<std::size_t>> current(t);
  std::vector<bool> used(detected.size(), false);
  // Exhaustive over injective truth -> (detected | none) maps; first maximum wins.
  auto search = [&](auto&& self, std::size_t i) -> void {
    if (i == t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < t; ++k) sum += current[k] ? table[k][*current[k]] : 0.0;
      if (sum > best_sum) {
        best_sum = sum;
        best.assignment = current;
      }
      return;
    }
    for (std::size_t j = 0; j < detected.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      current[i] = j;
      self(self, i + 1);
      used[j] = false;
    }
    current[i].reset();
    self(self, i + 1);
  };
  search(search, 0);

  best.truth_iou.assign(t, 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < t; ++k) {
    if (best.assignment[k]) best.truth_iou[k] = table[k][*best.assignment[k]];
    best.best_iou = std::max(best.best_iou, best.truth_iou[k]);
    sum += best.truth_iou[k];
  }
  best.mean_iou = sum / static_cast<double>(t);
  return best;
}

void ConfusionMatrix::add(GarmentLabel truth, GarmentLabel predicted) {
  ++counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
}

long long ConfusionMatrix::count(GarmentLabel truth, GarmentLabel predicted) const {
  return counts_[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
}

long long ConfusionMatrix::row_total(GarmentLabel truth) const {
  long long n = 0;
  for (long long c : counts_[static_cast<std::size_t>(truth)]) n += c;
  return n;
}

std::array<std::array<double, kLabelCount>, kLabelCount> ConfusionMatrix::percentages() const {
  std::array<std::array<double, kLabelCount>, kLabelCount> out{};
  for (std::size_t r = 0; r < kLabelCount; ++r) {
    const long long total = row_total(static_cast<GarmentLabel>(r));
    if (total == 0) continue;
    for (std::size_t c = 0; c < kLabelCount; ++c) {
      out[r][c] = 100.0 * static_cast<double>(counts_[r][c]) / static_cast<double>(total);
    }
  }
  return out;
}

const ClassStats& EvalReport::stats(GarmentLabel label) const {
  if (label == GarmentLabel::kNoDetection) throw InvalidArgument("no statistics for NoDetection");
  return per_class[static_cast<std::size_t>(label)];
}

EvalReport evaluate(const std::vector<DetectionRecord>& detections, const std::vector<AnnotationRecord>& annotations,
                    int side) {
  if (detections.size() != annotations.size()) throw InvalidArgument("evaluate: list lengths differ");
  EvalReport report;
  std::array<double, 3> mean_sum{}, best_sum{};
  std::array<int, 3> hit1{}, hit2{};

  for (std::size_t i = 0; i < detections.size(); ++i) {
    const DetectionRecord& det = detections[i];
    const AnnotationRecord& truth = annotations[i];
    if (det.id != truth.id) {
      throw InvalidArgument("evaluate: id mismatch at " + std::to_string(i) + " ('" + det.id + "' vs '" + truth.id +
                            "')");
    }
    report.confusion.add(truth.key_part_label, det.label);

    ImageDiagnostics diag;
    diag.id = det.id;
    diag.truth = truth.key_part_label;
    diag.predicted = det.label;
    if (!truth.grasp_points.empty()) {
      const PointMatch m = match_points(det.points, truth.grasp_points, det.width, det.height, side);
      diag.truth_iou = m.truth_iou;
      diag.best_iou = m.best_iou;
      diag.mean_iou = m.mean_iou;
      diag.correct_points =
          static_cast<int>(std::count_if(m.truth_iou.begin(), m.truth_iou.end(),
                                         [](double v) { return v > kCorrectIou; }));

      const auto c = static_cast<std::size_t>(truth.key_part_label);
      ++report.per_class[c].images;
      mean_sum[c] += m.mean_iou;
      best_sum[c] += m.best_iou;
      hit1[c] += diag.correct_points >= 1;
      hit2[c] += diag.correct_points >= 2;
    }
    report.images.push_back(std::move(diag));
  }

  for (std::size_t c = 0; c < 3; ++c) {
    ClassStats& s = report.per_class[c];
    if (s.images == 0) continue;
    s.mean_iou = mean_sum[c] / s.images;
    s.best_iou = best_sum[c] / s.images;
    s.recall_1 = 100.0 * hit1[c] / s.images;
    s.recall_2 = 100.0 * hit2[c] / s.images;
  }
  return report;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_report(const EvalReport& report) {
  std::string out = "eval-report v1\n";
  for (GarmentLabel l : kKeyPartLabels) {
    const ClassStats& s = report.stats(l);
    out += "class " + std::string(label_code(l)) + " images " + std::to_string(s.images) + " mean_iou " +
           fixed6(s.mean_iou) + " best_iou " + fixed6(s.best_iou) + " recall_1 " + fixed6(s.recall_1) +
           " recall_2 " + fixed6(s.recall_2) + "\n";
  }
  for (std::size_t r = 0; r < kLabelCount; ++r) {
    out += "confusion " + std::string(label_code(static_cast<GarmentLabel>(r)));
    for (std::size_t c = 0; c < kLabelCount; ++c) {
      out += ' ' + std::to_string(report.confusion.count(static_cast<GarmentLabel>(r), static_cast<GarmentLabel>(c)));
    }
    out += '\n';
  }
  for (const ImageDiagnostics& d : report.images) {
    out += "image " + d.id + " truth " + std::string(label_code(d.truth)) + " predicted " +
           std::string(label_code(d.predicted)) + " iou";
    for (double v : d.truth_iou) out += ' ' + fixed6(v);
    out += " best " + fixed6(d.best_iou) + " mean " + fixed6(d.mean_iou) + " correct " +
           std::to_string(d.correct_points) + '\n';
  }
  return out;
}

std::string format_report_table(const EvalReport& report) {
  char line[256];
  std::string out = "Key-part recognition (% of truth row)\n";
  std::snprintf(line, sizeof line, "%-6s %12s %12s %12s %12s\n", "", "NS", "NTS", "W", "ND");
  out += line;
  const auto pct = report.confusion.percentages();
  for (GarmentLabel l : kKeyPartLabels) {
    const auto& row = pct[static_cast<std::size_t>(l)];
    std::snprintf(line, sizeof line, "%-6s %12s %12s %12s %12s\n", std::string(label_code(l)).c_str(),
                  fixed6(row[0]).c_str(), fixed6(row[1]).c_str(), fixed6(row[2]).c_str(), fixed6(row[3]).c_str());
    out += line;
  }
  out += "\nGrasp points\n";
  std::snprintf(line, sizeof line, "%-6s %7s %12s %12s %12s %12s\n", "class", "images", "mean IoU", "best IoU",
                "recall@1 %", "recall@2 %");
  out += line;
  for (GarmentLabel l : kKeyPartLabels) {
    const ClassStats& s = report.stats(l);
    std::snprintf(line, sizeof line, "%-6s %7d %12s %12s %12s %12s\n", std::string(label_code(l)).c_str(), s.images,
                  fixed6(s.mean_iou).c_str(), fixed6(s.best_iou).c_str(), fixed6(s.recall_1).c_str(),
                  fixed6(s.recall_2).c_str());
    out += line;
  }
  return out;
}

}  // namespace clothgrasp
