#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clothgrasp/error.hpp"

namespace clothgrasp {

/// Integer pixel coordinate; x is the column, y the row.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Row-major 2D grid of values.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("grid dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InvalidArgument("grid data length does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(Pixel p) const noexcept { return contains(p.x, p.y); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator[](Pixel p) noexcept { return data_[index(p.x, p.y)]; }
  const T& operator[](Pixel p) const noexcept { return data_[index(p.x, p.y)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
  template <class U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return other.width() == width_ && other.height() == height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Binary per-pixel mask; nonzero means set.
using Mask = Grid<std::uint8_t>;

inline std::size_t count_set(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.data()) n += v != 0;
  return n;
}

}  // namespace clothgrasp
