#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "clothgrasp/data_io.hpp"

namespace clothgrasp {

static_assert(std::endian::native == std::endian::little, "PCD binary payloads are read as little-endian");

PcdError::PcdError(Kind kind, std::size_t offset, const std::string& what)
    : Error(std::string(pcd_error_name(kind)) + " at byte " + std::to_string(offset) + ": " + what),
      kind_(kind),
      offset_(offset) {}

std::string_view pcd_error_name(PcdError::Kind kind) {
  switch (kind) {
    case PcdError::Kind::kMalformedHeader: return "malformed header";
    case PcdError::Kind::kUnsupportedVersion: return "unsupported version";
    case PcdError::Kind::kUnsupportedDataMode: return "unsupported data mode";
    case PcdError::Kind::kFieldMismatch: return "field mismatch";
    case PcdError::Kind::kTruncated: return "truncated payload";
  }
  return "pcd error";
}

namespace {

using Kind = PcdError::Kind;

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

struct Field {
  std::string name;
  int size = 4;
  char type = 'F';
  int count = 1;
  std::size_t offset = 0;  // byte offset within a binary point record
  std::size_t column = 0;  // first token within an ascii row
};

struct Header {
  std::vector<Field> fields;
  long long width = -1;
  long long height = -1;
  long long points = -1;
  Eigen::Vector3d viewpoint = Eigen::Vector3d::Zero();
  bool binary = false;
  std::size_t data_offset = 0;
  std::size_t point_bytes = 0;
  std::size_t row_tokens = 0;
  int xyz[3] = {-1, -1, -1};
};

Header parse_header(std::string_view bytes) {
  Header h;
  std::vector<std::string_view> names, sizes, types, counts;
  bool have_version = false, have_data = false;
  std::size_t pos = 0;
  while (pos < bytes.size() && !have_data) {
    const std::size_t line_start = pos;
    std::size_t eol = bytes.find('\n', pos);
    const bool last = eol == std::string_view::npos;
    if (last) eol = bytes.size();
    const std::string_view line = bytes.substr(pos, eol - pos);
    pos = last ? bytes.size() : eol + 1;

    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const std::string_view key = tok[0];
    const std::vector<std::string_view> vals(tok.begin() + 1, tok.end());
    auto single_int = [&](long long& dst) {
      if (vals.size() != 1 || !parse_number(vals[0], dst) || dst < 0) {
        throw PcdError(Kind::kMalformedHeader, line_start, "bad " + std::string(key) + " value");
      }
    };

    if (key == "VERSION") {
      if (vals.size() != 1) throw PcdError(Kind::kMalformedHeader, line_start, "bad VERSION line");
      if (vals[0] != "0.7" && vals[0] != ".7") {
        throw PcdError(Kind::kUnsupportedVersion, line_start, "version '" + std::string(vals[0]) + "'");
      }
      have_version = true;
    } else if (key == "FIELDS") {
      names = vals;
    } else if (key == "SIZE") {
      sizes = vals;
    } else if (key == "TYPE") {
      types = vals;
    } else if (key == "COUNT") {
      counts = vals;
    } else if (key == "WIDTH") {
      single_int(h.width);
    } else if (key == "HEIGHT") {
      single_int(h.height);
    } else if (key == "POINTS") {
      single_int(h.points);
    } else if (key == "VIEWPOINT") {
      double v[7];
      if (vals.size() != 7) throw PcdError(Kind::kMalformedHeader, line_start, "VIEWPOINT needs 7 values");
      for (int i = 0; i < 7; ++i) {
        if (!parse_number(vals[i], v[i])) throw PcdError(Kind::kMalformedHeader, line_start, "bad VIEWPOINT value");
      }
      h.viewpoint = {v[0], v[1], v[2]};
    } else if (key == "DATA") {
      if (vals.size() != 1) throw PcdError(Kind::kMalformedHeader, line_start, "bad DATA line");
      if (vals[0] == "ascii") {
        h.binary = false;
      } else if (vals[0] == "binary") {
        h.binary = true;
      } else if (vals[0] == "binary_compressed") {
        throw PcdError(Kind::kUnsupportedDataMode, line_start, "binary_compressed is not supported");
      } else {
        throw PcdError(Kind::kUnsupportedDataMode, line_start, "unknown DATA mode '" + std::string(vals[0]) + "'");
      }
      have_data = true;
      h.data_offset = pos;
    } else {
      throw PcdError(Kind::kMalformedHeader, line_start, "unknown header key '" + std::string(key) + "'");
    }
  }

  if (!have_data) throw PcdError(Kind::kMalformedHeader, bytes.size(), "missing DATA line");
  const std::size_t at = h.data_offset;
  if (!have_version) throw PcdError(Kind::kMalformedHeader, at, "missing VERSION");
  if (names.empty()) throw PcdError(Kind::kMalformedHeader, at, "missing FIELDS");
  if (h.width < 0 || h.height < 0 || h.points < 0) {
    throw PcdError(Kind::kMalformedHeader, at, "missing WIDTH, HEIGHT or POINTS");
  }
  if (sizes.size() != names.size() || types.size() != names.size() ||
      (!counts.empty() && counts.size() != names.size())) {
    throw PcdError(Kind::kFieldMismatch, at, "FIELDS, SIZE, TYPE and COUNT lengths differ");
  }
  if (h.width * h.height != h.points) throw PcdError(Kind::kFieldMismatch, at, "WIDTH*HEIGHT != POINTS");

  for (std::size_t i = 0; i < names.size(); ++i) {
    Field f;
    f.name = std::string(names[i]);
    if (!parse_number(sizes[i], f.size) || (f.size != 1 && f.size != 2 && f.size != 4 && f.size != 8)) {
      throw PcdError(Kind::kFieldMismatch, at, "bad SIZE for field " + f.name);
    }
    if (types[i].size() != 1 || std::string_view("IUF").find(types[i][0]) == std::string_view::npos) {
      throw PcdError(Kind::kFieldMismatch, at, "bad TYPE for field " + f.name);
    }
    f.type = types[i][0];
    if (f.type == 'F' && f.size != 4 && f.size != 8) {
      throw PcdError(Kind::kFieldMismatch, at, "float field " + f.name + " must have SIZE 4 or 8");
    }
    if (!counts.empty() && (!parse_number(counts[i], f.count) || f.count < 1)) {
      throw PcdError(Kind::kFieldMismatch, at, "bad COUNT for field " + f.name);
    }
    f.offset = h.point_bytes;
    f.column = h.row_tokens;
    h.point_bytes += static_cast<std::size_t>(f.size) * f.count;
    h.row_tokens += static_cast<std::size_t>(f.count);
    for (int a = 0; a < 3; ++a) {
      if (f.name == std::string_view("xyz" + a, 1)) {
        if (f.count != 1) throw PcdError(Kind::kFieldMismatch, at, "coordinate field with COUNT != 1");
        h.xyz[a] = static_cast<int>(i);
      }
    }
    h.fields.push_back(std::move(f));
  }
  if (h.xyz[0] < 0 || h.xyz[1] < 0 || h.xyz[2] < 0) throw PcdError(Kind::kFieldMismatch, at, "missing x, y or z field");
  return h;
}

double read_binary_value(const char* p, const Field& f) {
  switch (f.type) {
    case 'F':
      if (f.size == 4) {
        float v;
        std::memcpy(&v, p, 4);
        return v;
      } else {
        double v;
        std::memcpy(&v, p, 8);
        return v;
      }
    case 'I': {
      switch (f.size) {
        case 1: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
        case 2: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
        case 4: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
        default: { std::int64_t v; std::memcpy(&v, p, 8); return static_cast<double>(v); }
      }
    }
    default: {
      switch (f.size) {
        case 1: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
        case 2: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
        case 4: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
        default: { std::uint64_t v; std::memcpy(&v, p, 8); return static_cast<double>(v); }
      }
    }
  }
}

bool parse_ascii_value(std::string_view tok, double& out) {
  if (tok == "nan" || tok == "NaN" || tok == "-nan" || tok == "NAN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  return parse_number(tok, out);
}

void add_point(PointCloud& cloud, const double v[3]) {
  const bool ok = std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
  cloud.push_back(Eigen::Vector3d(v[0], v[1], v[2]), ok);
}

}  // namespace

PointCloud parse_pcd(std::string_view bytes) {
  const Header h = parse_header(bytes);
  PointCloud cloud;
  cloud.viewpoint = h.viewpoint;
  if (h.height > 1) cloud.organized = OrganizedShape{static_cast<int>(h.width), static_cast<int>(h.height)};
  const auto n = static_cast<std::size_t>(h.points);
  cloud.points.reserve(n);
  cloud.valid.reserve(n);

  if (h.binary) {
    const std::size_t available = bytes.size() - h.data_offset;
    if (available / h.point_bytes < n) {
      const std::size_t complete = available / h.point_bytes;
      throw PcdError(Kind::kTruncated, h.data_offset + complete * h.point_bytes,
                     "payload holds " + std::to_string(complete) + " of " + std::to_string(n) + " points");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const char* rec = bytes.data() + h.data_offset + i * h.point_bytes;
      double v[3];
      for (int a = 0; a < 3; ++a) {
        const Field& f = h.fields[static_cast<std::size_t>(h.xyz[a])];
        v[a] = read_binary_value(rec + f.offset, f);
      }
      add_point(cloud, v);
    }
    return cloud;
  }

  std::size_t pos = h.data_offset;
  std::size_t row = 0;
  while (row < n) {
    if (pos >= bytes.size()) {
      throw PcdError(Kind::kTruncated, bytes.size(),
                     "expected " + std::to_string(n) + " rows, data ends at row " + std::to_string(row));
    }
    const std::size_t line_start = pos;
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    const auto tok = split_ws(bytes.substr(pos, eol - pos));
    pos = eol + 1;
    if (tok.empty()) continue;
    if (tok.size() != h.row_tokens) {
      throw PcdError(Kind::kFieldMismatch, line_start,
                     "row " + std::to_string(row) + " has " + std::to_string(tok.size()) + " values, expected " +
                         std::to_string(h.row_tokens));
    }
    double v[3];
    for (int a = 0; a < 3; ++a) {
      const Field& f = h.fields[static_cast<std::size_t>(h.xyz[a])];
      if (!parse_ascii_value(tok[f.column], v[a])) {
        throw PcdError(Kind::kMalformedHeader, line_start, "row " + std::to_string(row) + ": bad number");
      }
      // Same values the binary encoding of this field would hold.
      if (f.type == 'F' && f.size == 4) v[a] = static_cast<float>(v[a]);
    }
    add_point(cloud, v);
    ++row;
  }
  return cloud;
}

PointCloud read_pcd(const std::string& path) { return parse_pcd(read_file(path)); }

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string shortest(float v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string write_pcd(const PointCloud& cloud, PcdEncoding encoding) {
  const std::size_t n = cloud.size();
  const int width = cloud.organized ? cloud.organized->width : static_cast<int>(n);
  const int height = cloud.organized ? cloud.organized->height : 1;
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != n) {
    throw InvalidArgument("write_pcd: organized shape does not match point count");
  }
  std::string out;
  out += "# .PCD v0.7 - Point Cloud Data file format\n";
  out += "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n";
  out += "WIDTH " + std::to_string(width) + "\nHEIGHT " + std::to_string(height) + "\n";
  out += "VIEWPOINT " + shortest(cloud.viewpoint.x()) + ' ' + shortest(cloud.viewpoint.y()) + ' ' +
         shortest(cloud.viewpoint.z()) + " 1 0 0 0\n";
  out += "POINTS " + std::to_string(n) + "\n";
  out += encoding == PcdEncoding::kBinary ? "DATA binary\n" : "DATA ascii\n";

  const float nan = std::numeric_limits<float>::quiet_NaN();
  if (encoding == PcdEncoding::kBinary) {
    out.reserve(out.size() + n * 12);
    for (std::size_t i = 0; i < n; ++i) {
      float v[3];
      for (int a = 0; a < 3; ++a) v[a] = cloud.valid[i] ? static_cast<float>(cloud.points[i][a]) : nan;
      out.append(reinterpret_cast<const char*>(v), sizeof v);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        if (a) out += ' ';
        out += shortest(cloud.valid[i] ? static_cast<float>(cloud.points[i][a]) : nan);
      }
      out += '\n';
    }
  }
  return out;
}

void save_pcd(const std::string& path, const PointCloud& cloud, PcdEncoding encoding) {
  write_file(path, write_pcd(cloud, encoding));
}

DepthImage cloud_to_depth(const PointCloud& cloud) {
  if (!cloud.organized) throw InvalidArgument("cloud_to_depth: cloud is not organized");
  const auto [w, h] = *cloud.organized;
  DepthImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (cloud.valid[i]) img.set(x, y, static_cast<float>(cloud.points[i].z()));
    }
  }
  return img;
}

}  // namespace clothgrasp
