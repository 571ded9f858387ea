#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "contournet/errors.hpp"

namespace contournet {

enum class Orientation { kHorizontal, kVertical };

const char* to_string(Orientation orientation);

/// Dense row-major raster. Used for heatmaps, feature maps and distance
/// transforms (FloatGrid) and for binary label rasters (BitMask).
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    if (height < 0 || width < 0) {
      throw InvalidGrid("grid dimensions must be non-negative, got " +
                        std::to_string(height) + "x" + std::to_string(width));
    }
    values_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  Grid(int height, int width, std::vector<T> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (height < 0 || width < 0 ||
        values_.size() != static_cast<std::size_t>(height) * width) {
      throw InvalidGrid("value count does not match " + std::to_string(height) +
                        "x" + std::to_string(width));
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(int row, int col) {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& operator()(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }

  bool in_bounds(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::vector<T>& values() noexcept { return values_; }
  const std::vector<T>& values() const noexcept { return values_; }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ &&
           a.values_ == b.values_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> values_;
};

using FloatGrid = Grid<double>;
using BitMask = Grid<std::uint8_t>;

template <typename T>
Grid<T> transpose(const Grid<T>& grid) {
  Grid<T> out(grid.width(), grid.height());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) out(c, r) = grid(r, c);
  }
  return out;
}

inline std::size_t popcount(const BitMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(),
                    [](std::uint8_t b) { return b != 0; }));
}

/// Bitwise OR of two masks of the same shape, in place.
void mask_union_inplace(BitMask& into, const BitMask& other);

/// Throws InvalidGrid unless both grids have the same shape.
template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidGrid(std::string(what) + ": shape mismatch (" +
                      std::to_string(a.height()) + "x" +
                      std::to_string(a.width()) + " vs " +
                      std::to_string(b.height()) + "x" +
                      std::to_string(b.width()) + ")");
  }
}

}  // namespace contournet
