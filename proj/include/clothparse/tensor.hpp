#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clothparse/error.hpp"

namespace clothparse {

// Dense channel-major (label, row, col) array. Heatmaps, probability maps and
// per-label indicator stacks all share this layout.
template <typename T>
class Tensor3 {
 public:
  using value_type = T;

  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t height, std::size_t width, T fill = T{})
      : channels_(channels), height_(height), width_(width),
        data_(channels * height * width, fill) {}

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * height_ + y) * width_ + x];
  }
  const T& operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }
  // Channel c at flat pixel index p = y * width + x.
  T& at(std::size_t c, std::size_t p) { return data_[c * pixels() + p]; }
  const T& at(std::size_t c, std::size_t p) const { return data_[c * pixels() + p]; }

  std::span<T> channel(std::size_t c) { return {data_.data() + c * pixels(), pixels()}; }
  std::span<const T> channel(std::size_t c) const {
    return {data_.data() + c * pixels(), pixels()};
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const Tensor3& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  template <typename U>
  Tensor3<U> cast() const {
    Tensor3<U> out(channels_, height_, width_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.values()[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

// Per-label score maps F_i (the segmentation trunk output). Stored in single
// precision because that is what the HMT1 interchange format carries.
using HeatmapStack = Tensor3<float>;

// Per-pixel label distributions; each pixel sums to one.
using ProbMaps = Tensor3<double>;

// Single-channel 2-D grid, used for label masks and superpixel id maps.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw InvalidArgument("grid data size does not match dimensions");
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  T& operator[](std::size_t p) { return data_[p]; }
  const T& operator[](std::size_t p) const { return data_[p]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using Label = std::uint8_t;

// Per-pixel label index image. Validity against a palette is checked at the
// IO boundary (see palette.hpp / png_io.hpp).
using LabelMask = Grid<Label>;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");

using RgbImage = Grid<Rgb>;

}  // namespace clothparse
