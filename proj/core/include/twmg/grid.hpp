#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "twmg/error.hpp"

namespace twmg {

struct PixelIndex {
  std::size_t row{0};
  std::size_t col{0};
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// Dense row-major 2-D array. Row index runs along y, column index along x.
template <class T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  bool same_shape(const Grid2D& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool contains(PixelIndex p) const noexcept { return p.row < height_ && p.col < width_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t width_{0};
  std::size_t height_{0};
  std::vector<T> data_;
};

using RealGrid = Grid2D<double>;

inline void require_same_shape(const auto& a, const auto& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::ShapeMismatch, what);
  }
}

}  // namespace twmg
