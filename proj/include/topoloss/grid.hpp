#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "topoloss/error.hpp"

namespace topoloss {

/// Dense row-major raster, row 0 at the top.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::uint32_t width, std::uint32_t height, T fill = T{})
      : width_(width), height_(height), data_(std::size_t{width} * height, fill) {}
  Grid(std::uint32_t width, std::uint32_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != std::size_t{width} * height)
      throw InvalidArgument("grid data length does not match width*height");
  }

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::uint32_t x, std::uint32_t y) const noexcept {
    return std::size_t{y} * width_ + x;
  }
  bool contains(long long x, long long y) const noexcept {
    return x >= 0 && y >= 0 && x < static_cast<long long>(width_) &&
           y < static_cast<long long>(height_);
  }

  T& operator()(std::uint32_t x, std::uint32_t y) noexcept { return data_[index(x, y)]; }
  const T& operator()(std::uint32_t x, std::uint32_t y) const noexcept {
    return data_[index(x, y)];
  }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& vector() const noexcept { return data_; }

  template <typename U>
  bool same_extent(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<T> data_;
};

using ScalarGrid = Grid<float>;
using BinaryMask = Grid<std::uint8_t>;

/// Connected-component labelling: 0 = unlabelled, 1..count = component id.
struct LabelGrid {
  Grid<std::int32_t> ids;
  std::int32_t count = 0;

  std::uint32_t width() const noexcept { return ids.width(); }
  std::uint32_t height() const noexcept { return ids.height(); }
  std::size_t size() const noexcept { return ids.size(); }
  std::int32_t operator[](std::size_t i) const noexcept { return ids[i]; }

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;
};

struct WindowSpec {
  std::uint32_t x0 = 0;
  std::uint32_t y0 = 0;
  std::uint32_t w = 0;
  std::uint32_t h = 0;

  std::size_t area() const noexcept { return std::size_t{w} * h; }
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

enum class Connectivity { four = 4, eight = 8 };

template <typename A, typename B>
void require_same_extent(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_extent(b)) throw ExtentMismatch(what);
}

/// Disk dilation: a pixel is set iff some set pixel lies within Euclidean
/// distance `radius` of it.
BinaryMask dilate(const BinaryMask& mask, int radius);

/// Labels follow raster order of each component's first pixel.
LabelGrid connected_components(const BinaryMask& mask, Connectivity connectivity);

/// Exact squared Euclidean distance to the nearest set pixel; +inf when the
/// mask is empty. Values are integers represented exactly in double.
std::vector<double> squared_distance_transform(const BinaryMask& mask);

/// Exact Euclidean distance to the nearest set pixel. An empty mask yields
/// width + height everywhere.
ScalarGrid distance_transform(const BinaryMask& mask);

/// Disjoint win x win tiles covering the extent, left-to-right then
/// top-to-bottom; tiles on the right/bottom boundary are clipped.
std::vector<WindowSpec> tile(std::uint32_t width, std::uint32_t height, std::uint32_t win);

template <typename T>
Grid<T> crop(const Grid<T>& grid, const WindowSpec& win);

/// Labels are recomputed (4-connectivity) inside the window, so a component
/// cut by the window boundary may split into several.
LabelGrid crop(const LabelGrid& labels, const WindowSpec& win);

BinaryMask complement(const BinaryMask& mask);

namespace detail {
void check_window(std::uint32_t width, std::uint32_t height, const WindowSpec& win);
}

template <typename T>
Grid<T> crop(const Grid<T>& grid, const WindowSpec& win) {
  detail::check_window(grid.width(), grid.height(), win);
  Grid<T> out(win.w, win.h);
  for (std::uint32_t y = 0; y < win.h; ++y)
    for (std::uint32_t x = 0; x < win.w; ++x) out(x, y) = grid(win.x0 + x, win.y0 + y);
  return out;
}

}  // namespace topoloss
