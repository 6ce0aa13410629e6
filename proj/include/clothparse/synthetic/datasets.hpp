#pragma once

// Synthetic stand-ins for annotated clothing photos. Heatmaps are built from
// the ground truth (one-hot, Gaussian noise, cross-talk), so the pipeline
// downstream of the segmentation trunk can be exercised without a deep net.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "clothparse/palette.hpp"
#include "clothparse/random.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse::synthetic {

struct Item {
  std::string id;
  RgbImage image;
  LabelMask gt;
  HeatmapStack heatmaps;
};

// Five labels with one mutually exclusive garment pair: an outfit is either
// a dress, or a top with a skirt, never a dress and a skirt together.
enum OutfitLabel : Label { kBackground = 0, kSkin = 1, kTop = 2, kSkirt = 3, kDress = 4 };

inline Palette outfit_palette() {
  return Palette({{0, "background", {0, 0, 0}},
                  {1, "skin", {255, 200, 160}},
                  {2, "top", {230, 200, 40}},
                  {3, "skirt", {40, 160, 70}},
                  {4, "dress", {150, 50, 170}}});
}

struct OutfitConfig {
  std::size_t count = 60;
  std::size_t width = 24;
  std::size_t height = 32;
  double heatmap_noise = 0.5;  // stddev of the Gaussian corruption
  double cross_talk = 1.0;     // score leaked into the exclusive partner's channel
  double color_noise = 8.0;    // per-pixel RGB jitter
  std::uint64_t seed = 7;
};

namespace detail {

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline Rgb jitter(Rng& rng, std::array<double, 3> base, double sigma) {
  return {clamp_u8(base[0] + rng.normal(0, sigma)), clamp_u8(base[1] + rng.normal(0, sigma)),
          clamp_u8(base[2] + rng.normal(0, sigma))};
}

inline HeatmapStack corrupt(Rng& rng, const LabelMask& gt, std::size_t labels, double noise,
                            double cross_talk, const std::vector<int>& partner) {
  HeatmapStack h(labels, gt.height(), gt.width());
  for (std::size_t p = 0; p < gt.size(); ++p) {
    for (std::size_t l = 0; l < labels; ++l) {
      double v = (gt[p] == l ? 1.0 : 0.0) + rng.normal(0.0, noise);
      if (partner[gt[p]] >= 0 && std::size_t(partner[gt[p]]) == l) v += cross_talk;
      h.at(l, p) = static_cast<float>(v);
    }
  }
  return h;
}

}  // namespace detail

// Front-facing "person" on a plain background: a skin head and legs, plus
// either a dress or a top-and-skirt outfit. Garment colours identify the
// garment, so the image as a whole reveals which outfit is worn.
inline std::vector<Item> outfit_dataset(const OutfitConfig& cfg = {}) {
  Rng rng(cfg.seed);
  const std::size_t w = cfg.width, h = cfg.height;
  const std::array<std::array<double, 3>, 5> base{{{90, 110, 140},
                                                   {230, 180, 150},
                                                   {230, 200, 40},
                                                   {50, 150, 90},
                                                   {50, 150, 90}}};
  // Cross-talk partners: dress pixels leak into skirt and vice versa; top
  // pixels leak into dress, which would cover the same region.
  const std::vector<int> partner{-1, -1, kDress, kDress, kSkirt};
  std::vector<Item> items;
  for (std::size_t n = 0; n < cfg.count; ++n) {
    const bool dress = rng.uniform() < 0.5;
    const double cx = double(w) / 2.0 + rng.uniform(-2.0, 2.0);
    const double head_r = double(w) * rng.uniform(0.13, 0.18);
    const double head_y = double(h) * 0.14;
    const double torso_top = double(h) * 0.28, waist = double(h) * rng.uniform(0.5, 0.56);
    const double hem = double(h) * rng.uniform(0.72, 0.8);
    const double half_w = double(w) * rng.uniform(0.2, 0.26);

    LabelMask gt(w, h, kBackground);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double fx = double(x) + 0.5, fy = double(y) + 0.5;
        Label v = kBackground;
        if ((fx - cx) * (fx - cx) + (fy - head_y) * (fy - head_y) <= head_r * head_r) v = kSkin;
        if (fy >= torso_top && fy < hem) {
          // Skirt and dress flare below the waist.
          const double flare = fy > waist ? (fy - waist) * 0.35 : 0.0;
          if (std::abs(fx - cx) <= half_w + flare) v = dress ? kDress : (fy < waist ? kTop : kSkirt);
        }
        if (fy >= hem && fy < double(h) * 0.97) {
          const double leg = half_w * 0.45;
          if (std::abs(std::abs(fx - cx) - leg * 0.9) <= leg * 0.5) v = kSkin;
        }
        gt(x, y) = v;
      }
    }

    std::array<std::array<double, 3>, 5> colors = base;
    for (auto& c : colors)
      for (double& ch : c) ch += rng.normal(0.0, 10.0);
    colors[kDress] = colors[kSkirt];
    RgbImage img(w, h);
    for (std::size_t p = 0; p < gt.size(); ++p) img[p] = detail::jitter(rng, colors[gt[p]], cfg.color_noise);

    Item it{"outfit_" + std::to_string(n / 100) + std::to_string(n / 10 % 10) + std::to_string(n % 10),
            std::move(img), gt, {}};
    it.heatmaps = detail::corrupt(rng, it.gt, 5, cfg.heatmap_noise, cfg.cross_talk, partner);
    items.push_back(std::move(it));
  }
  return items;
}

struct StripeConfig {
  std::size_t count = 4;
  std::size_t size = 16;         // square images
  std::size_t stripe_width = 3;  // columns per stripe
  double heatmap_noise = 1.0;
  double color_gap = 24.0;       // RGB distance between the two stripe colours
  double color_noise = 8.0;
  std::uint64_t seed = 11;
};

inline Palette stripe_palette() {
  return Palette({{0, "background", {0, 0, 0}}, {1, "stripe", {255, 255, 255}}});
}

// Fine vertical stripes alternating between two labels with weakly
// distinguishable colours and noisy unaries. Any smoothing reach much wider
// than a stripe erases the pattern.
inline std::vector<Item> stripe_dataset(const StripeConfig& cfg = {}) {
  Rng rng(cfg.seed);
  std::vector<Item> items;
  const std::vector<int> partner{-1, -1};
  for (std::size_t n = 0; n < cfg.count; ++n) {
    const std::size_t s = cfg.size;
    const std::size_t phase = rng.below(cfg.stripe_width * 2);
    LabelMask gt(s, s);
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t x = 0; x < s; ++x) gt(x, y) = Label(((x + phase) / cfg.stripe_width) % 2);
    const double base = rng.uniform(100.0, 140.0);
    RgbImage img(s, s);
    for (std::size_t p = 0; p < gt.size(); ++p) {
      const double v = base + (gt[p] ? cfg.color_gap / std::sqrt(3.0) : 0.0);
      img[p] = detail::jitter(rng, {v, v, v}, cfg.color_noise);
    }
    Item it{"stripes_" + std::to_string(n), std::move(img), gt, {}};
    it.heatmaps = detail::corrupt(rng, it.gt, 2, cfg.heatmap_noise, 0.0, partner);
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace clothparse::synthetic
