#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "clothparse/tensor.hpp"

namespace clothparse {

namespace smooth_detail {

struct Offset {
  int dx, dy;
};

inline std::vector<Offset> disc(int radius) {
  std::vector<Offset> out;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) out.push_back({dx, dy});
  return out;
}

// Binary dilation (any) or erosion (all) over the in-bounds part of the disc.
inline std::vector<std::uint8_t> morph(const std::vector<std::uint8_t>& in, std::size_t w,
                                       std::size_t h, const std::vector<Offset>& se, bool dilate) {
  std::vector<std::uint8_t> out(in.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      bool v = !dilate;
      for (const auto& o : se) {
        auto xx = std::ptrdiff_t(x) + o.dx, yy = std::ptrdiff_t(y) + o.dy;
        if (xx < 0 || yy < 0 || xx >= std::ptrdiff_t(w) || yy >= std::ptrdiff_t(h)) continue;
        bool s = in[std::size_t(yy) * w + std::size_t(xx)] != 0;
        if (dilate && s) {
          v = true;
          break;
        }
        if (!dilate && !s) {
          v = false;
          break;
        }
      }
      out[y * w + x] = v ? 1 : 0;
    }
  }
  return out;
}

}  // namespace smooth_detail

// Removes superpixel artefacts from a label mask. Each label's indicator map
// is closed and then opened with a disc of the given radius. A pixel keeps the
// label whose smoothed indicator covers it; where several or none do, the
// most frequent of those labels in the pixel's disc neighbourhood of the input
// wins (ties prefer the current label, then the lowest index). Only labels of
// the input can appear in the output.
inline LabelMask smooth_mask(const LabelMask& mask, int radius) {
  using namespace smooth_detail;
  if (radius <= 0 || mask.empty()) return mask;
  const std::size_t w = mask.width(), h = mask.height(), n = w * h;
  const auto se = disc(radius);

  std::array<bool, 256> present{};
  for (Label v : mask.values()) present[v] = true;
  std::vector<Label> labels;
  for (std::size_t l = 0; l < 256; ++l)
    if (present[l]) labels.push_back(static_cast<Label>(l));
  if (labels.size() == 1) return mask;

  std::vector<std::vector<std::uint8_t>> smoothed;
  for (Label l : labels) {
    std::vector<std::uint8_t> ind(n);
    for (std::size_t p = 0; p < n; ++p) ind[p] = mask[p] == l;
    auto closed = morph(morph(ind, w, h, se, true), w, h, se, false);
    smoothed.push_back(morph(morph(closed, w, h, se, false), w, h, se, true));
  }

  LabelMask out(w, h);
  std::vector<std::size_t> votes(labels.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t p = y * w + x;
      std::size_t covering = 0, last = 0;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        if (smoothed[k][p]) {
          ++covering;
          last = k;
        }
      }
      if (covering == 1) {
        out[p] = labels[last];
        continue;
      }
      std::fill(votes.begin(), votes.end(), 0);
      for (const auto& o : se) {
        auto xx = std::ptrdiff_t(x) + o.dx, yy = std::ptrdiff_t(y) + o.dy;
        if (xx < 0 || yy < 0 || xx >= std::ptrdiff_t(w) || yy >= std::ptrdiff_t(h)) continue;
        Label v = mask[std::size_t(yy) * w + std::size_t(xx)];
        auto k = std::size_t(std::lower_bound(labels.begin(), labels.end(), v) - labels.begin());
        ++votes[k];
      }
      std::size_t best = labels.size();
      for (std::size_t k = 0; k < labels.size(); ++k) {
        if (covering > 1 && !smoothed[k][p]) continue;
        if (best == labels.size() || votes[k] > votes[best] ||
            (votes[k] == votes[best] && labels[k] == mask[p] && labels[best] != mask[p])) {
          best = k;
        }
      }
      out[p] = labels[best];
    }
  }
  return out;
}

}  // namespace clothparse
