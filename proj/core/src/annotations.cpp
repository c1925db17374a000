#include <charconv>

#include "clothgrasp/data_io.hpp"

namespace clothgrasp {

namespace {

constexpr std::string_view kHeader = "grasp-annot v1";

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

Pixel parse_pixel(std::string_view tok, std::size_t line) {
  const std::size_t comma = tok.find(',');
  if (comma == std::string_view::npos) throw SchemaError(line, "expected x,y but got '" + std::string(tok) + "'");
  Pixel p;
  const auto parse = [&](std::string_view s, int& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0) {
      throw SchemaError(line, "bad pixel coordinate '" + std::string(tok) + "'");
    }
  };
  parse(tok.substr(0, comma), p.x);
  parse(tok.substr(comma + 1), p.y);
  return p;
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::string_view text) {
  std::vector<AnnotationRecord> records;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kHeader) throw SchemaError(line_no, "expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, '|');
    if (fields.size() != 5) {
      throw SchemaError(line_no, "expected 5 '|'-separated fields, got " + std::to_string(fields.size()));
    }
    AnnotationRecord rec;
    rec.id = std::string(trim(fields[0]));
    if (rec.id.empty()) throw SchemaError(line_no, "empty id");

    const auto label = parse_label(trim(fields[1]));
    if (!label || *label == GarmentLabel::kNoDetection) {
      throw SchemaError(line_no, "bad key-part label '" + std::string(trim(fields[1])) + "'");
    }
    rec.key_part_label = *label;

    for (std::string_view tok : split(trim(fields[2]), ' ')) {
      tok = trim(tok);
      if (!tok.empty()) rec.key_part_polygon.push_back(parse_pixel(tok, line_no));
    }
    if (rec.key_part_polygon.size() < 3) {
      throw SchemaError(line_no, "polygon needs at least 3 vertices, got " +
                                     std::to_string(rec.key_part_polygon.size()));
    }

    const std::string_view grasp = trim(fields[3]);
    if (!grasp.empty()) {
      for (std::string_view tok : split(grasp, ';')) rec.grasp_points.push_back(parse_pixel(trim(tok), line_no));
    }
    if (rec.grasp_points.size() > 2) throw SchemaError(line_no, "at most 2 grasp points allowed");

    rec.garment_mask_path = std::string(trim(fields[4]));
    records.push_back(std::move(rec));
  }
  return records;
}

std::string format_annotations(const std::vector<AnnotationRecord>& records) {
  std::string out(kHeader);
  out += '\n';
  const auto pix = [](Pixel p) { return std::to_string(p.x) + ',' + std::to_string(p.y); };
  for (const AnnotationRecord& r : records) {
    if (r.key_part_polygon.size() < 3) throw InvalidArgument("annotation '" + r.id + "': polygon needs 3 vertices");
    if (r.grasp_points.size() > 2) throw InvalidArgument("annotation '" + r.id + "': more than 2 grasp points");
    if (r.id.empty() || r.id.front() == '#' || r.id.find_first_of("|\n") != std::string::npos || trim(r.id) != r.id) {
      throw InvalidArgument("annotation id '" + r.id + "' cannot be written");
    }
    if (r.garment_mask_path.find_first_of("|\n") != std::string::npos ||
        trim(r.garment_mask_path) != r.garment_mask_path) {
      throw InvalidArgument("annotation '" + r.id + "': mask path cannot be written");
    }
    out += r.id;
    out += " | ";
    out += label_code(r.key_part_label);
    out += " |";
    for (const Pixel& p : r.key_part_polygon) out += ' ' + pix(p);
    out += " | ";
    for (std::size_t i = 0; i < r.grasp_points.size(); ++i) {
      if (i) out += ';';
      out += pix(r.grasp_points[i]);
    }
    out += " | ";
    out += r.garment_mask_path;
    out += '\n';
  }
  return out;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) { return parse_annotations(read_file(path)); }

void save_annotations(const std::string& path, const std::vector<AnnotationRecord>& records) {
  write_file(path, format_annotations(records));
}

}  // namespace clothgrasp
