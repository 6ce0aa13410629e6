#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "clothparse/tensor.hpp"

namespace clothparse {

// Per-pixel D-dimensional features, channel-major like the heatmaps.
using FeatureMap = Tensor3<double>;

inline constexpr std::size_t kFeatureDim = 11;
inline constexpr double kFeatureBlurSigmas[2] = {2.0, 4.0};

namespace feat_detail {

// Separable Gaussian blur with clamp-to-edge borders.
inline std::vector<double> blur(const std::vector<double>& in, std::size_t w, std::size_t h,
                                double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) sum += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= sum;
  auto clampi = [](std::ptrdiff_t v, std::size_t n) {
    return std::size_t(std::clamp<std::ptrdiff_t>(v, 0, std::ptrdiff_t(n) - 1));
  };
  std::vector<double> tmp(in.size()), out(in.size());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * in[y * w + clampi(std::ptrdiff_t(x) + i, w)];
      tmp[y * w + x] = acc;
    }
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp[clampi(std::ptrdiff_t(y) + i, h) * w + x];
      out[y * w + x] = acc;
    }
  return out;
}

}  // namespace feat_detail

// Fixed hand-crafted extractor standing in for a learned trunk:
// RGB / 255, normalised (x, y) in [0, 1], and RGB / 255 blurred at two scales.
inline FeatureMap extract_features(const RgbImage& image) {
  const std::size_t w = image.width(), h = image.height(), n = w * h;
  FeatureMap f(kFeatureDim, h, w);
  std::vector<double> rgb[3];
  for (auto& c : rgb) c.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    rgb[0][p] = image[p].r / 255.0;
    rgb[1][p] = image[p].g / 255.0;
    rgb[2][p] = image[p].b / 255.0;
  }
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < n; ++p) f.at(c, p) = rgb[c][p];
  for (std::size_t p = 0; p < n; ++p) {
    f.at(3, p) = w > 1 ? double(p % w) / double(w - 1) : 0.0;
    f.at(4, p) = h > 1 ? double(p / w) / double(h - 1) : 0.0;
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t c = 0; c < 3; ++c) {
      auto b = feat_detail::blur(rgb[c], w, h, kFeatureBlurSigmas[s]);
      for (std::size_t p = 0; p < n; ++p) f.at(5 + 3 * s + c, p) = b[p];
    }
  }
  return f;
}

}  // namespace clothparse
