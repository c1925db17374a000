#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include "clothgrasp/data_io.hpp"

namespace clothgrasp {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

namespace {

// Reads one whitespace-delimited header integer, skipping comments.
long read_header_int(std::string_view bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  long v = 0;
  const auto res = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
  if (res.ec != std::errc{} || v < 0) throw Error("pgm: bad header at byte " + std::to_string(pos));
  pos = static_cast<std::size_t>(res.ptr - bytes.data());
  return v;
}

}  // namespace

Grid<std::uint16_t> parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw Error("pgm: not a binary (P5) PGM");
  std::size_t pos = 2;
  const long w = read_header_int(bytes, pos);
  const long h = read_header_int(bytes, pos);
  const long maxval = read_header_int(bytes, pos);
  if (w <= 0 || h <= 0) throw Error("pgm: empty image");
  if (maxval < 1 || maxval > 65535) throw Error("pgm: maxval out of range");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error("pgm: missing separator after header");
  }
  ++pos;
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n * bps) throw Error("pgm: truncated pixel data");
  Grid<std::uint16_t> img(static_cast<int>(w), static_cast<int>(h));
  auto out = img.data();
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = bps == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
  }
  return img;
}

Grid<std::uint16_t> read_pgm(const std::string& path) { return parse_pgm(read_file(path)); }

std::string write_pgm(const Grid<std::uint16_t>& img, std::uint16_t maxval) {
  if (maxval == 0) throw InvalidArgument("write_pgm: maxval must be positive");
  std::string out = "P5\n" + std::to_string(img.width()) + ' ' + std::to_string(img.height()) + '\n' +
                    std::to_string(maxval) + '\n';
  const bool wide = maxval > 255;
  out.reserve(out.size() + img.size() * (wide ? 2 : 1));
  for (const std::uint16_t v0 : img.data()) {
    const std::uint16_t v = std::min(v0, maxval);
    if (wide) out += static_cast<char>(v >> 8);
    out += static_cast<char>(v & 0xff);
  }
  return out;
}

void save_pgm(const std::string& path, const Grid<std::uint16_t>& img, std::uint16_t maxval) {
  write_file(path, write_pgm(img, maxval));
}

DepthImage depth_from_pgm(const Grid<std::uint16_t>& mm) {
  DepthImage img(mm.width(), mm.height());
  for (int y = 0; y < mm.height(); ++y) {
    for (int x = 0; x < mm.width(); ++x) {
      if (mm(x, y)) img.set(x, y, static_cast<float>(mm(x, y) * 1e-3));
    }
  }
  return img;
}

Grid<std::uint16_t> depth_to_pgm(const DepthImage& depth) {
  Grid<std::uint16_t> out(depth.width(), depth.height());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.valid(x, y)) continue;
      const double mm = std::round(depth.at(x, y) * 1000.0);
      out(x, y) = static_cast<std::uint16_t>(std::clamp(mm, 1.0, 65535.0));
    }
  }
  return out;
}

Mask mask_from_pgm(const Grid<std::uint16_t>& img) {
  Mask m(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) m.data()[i] = img.data()[i] ? 1 : 0;
  return m;
}

Grid<std::uint16_t> mask_to_pgm(const Mask& mask) {
  Grid<std::uint16_t> out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out.data()[i] = mask.data()[i] ? 255 : 0;
  return out;
}

DepthImage load_depth(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".pcd")) return cloud_to_depth(read_pcd(path));
  if (ends_with(".pgm")) return depth_from_pgm(read_pgm(path));
  throw Error("unsupported depth file (expected .pcd or .pgm): " + path);
}

}  // namespace clothgrasp
