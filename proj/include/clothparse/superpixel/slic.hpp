#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/superpixel/color.hpp"
#include "clothparse/superpixel/connectivity.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

struct SlicConfig {
  std::size_t region_size = 16;   // grid step S in pixels
  double compactness = 10.0;      // m
  std::size_t iterations = 10;
  double min_region_fraction = 0.25;  // of S*S

  void validate() const {
    if (region_size < 2) throw InvalidArgument("slic: region_size must be >= 2");
    if (!(compactness > 0)) throw InvalidArgument("slic: compactness must be > 0");
    if (iterations < 1) throw InvalidArgument("slic: iterations must be >= 1");
    if (min_region_fraction < 0) throw InvalidArgument("slic: min_region_fraction must be >= 0");
  }

  std::size_t min_region_pixels() const {
    return static_cast<std::size_t>(min_region_fraction * double(region_size * region_size));
  }
};

inline SuperpixelMap enforce_connectivity(const SuperpixelMap& sp, const SlicConfig& cfg) {
  return enforce_connectivity(sp.ids, cfg.min_region_pixels());
}

namespace slic_detail {

struct Center {
  double l, a, b, x, y;
};

inline double lab_dist2(const Lab& p, const Center& c) {
  const double dl = p.l - c.l, da = p.a - c.a, db = p.b - c.b;
  return dl * dl + da * da + db * db;
}

}  // namespace slic_detail

// Grid-seeded local k-means over (Lab, xy) with distance
// D = sqrt(d_lab^2 + (d_xy / S)^2 * m^2), each centre searching a 2S x 2S
// window. Seeds start at grid-cell centres and move to the lowest-gradient
// pixel of their 3x3 neighbourhood. Connectivity is enforced on the result.
inline SuperpixelMap compute_slic(const RgbImage& image, const SlicConfig& cfg) {
  using slic_detail::Center;
  cfg.validate();
  const std::size_t w = image.width(), h = image.height();
  const std::size_t s = cfg.region_size;
  if (w == 0 || h == 0) throw InvalidArgument("slic: empty image");
  if (w < s || h < s) throw InvalidArgument("slic: image smaller than one region");

  std::vector<Lab> lab(w * h);
  for (std::size_t p = 0; p < w * h; ++p) lab[p] = rgb_to_lab(image[p]);

  auto gradient = [&](std::size_t x, std::size_t y) {
    auto at = [&](std::size_t xx, std::size_t yy) { return lab[yy * w + xx]; };
    Lab xm = at(x > 0 ? x - 1 : x, y), xp = at(x + 1 < w ? x + 1 : x, y);
    Lab ym = at(x, y > 0 ? y - 1 : y), yp = at(x, y + 1 < h ? y + 1 : y);
    auto d2 = [](Lab u, Lab v) {
      return (u.l - v.l) * (u.l - v.l) + (u.a - v.a) * (u.a - v.a) + (u.b - v.b) * (u.b - v.b);
    };
    return d2(xm, xp) + d2(ym, yp);
  };

  const std::size_t nx = (w + s - 1) / s, ny = (h + s - 1) / s;
  std::vector<Center> centers;
  centers.reserve(nx * ny);
  for (std::size_t gy = 0; gy < ny; ++gy) {
    for (std::size_t gx = 0; gx < nx; ++gx) {
      std::size_t x0 = gx * s + std::min(s, w - gx * s) / 2;
      std::size_t y0 = gy * s + std::min(s, h - gy * s) / 2;
      std::size_t bx = x0, by = y0;
      double best = gradient(x0, y0);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          auto xx = static_cast<std::ptrdiff_t>(x0) + dx, yy = static_cast<std::ptrdiff_t>(y0) + dy;
          if (xx < 0 || yy < 0 || xx >= std::ptrdiff_t(w) || yy >= std::ptrdiff_t(h)) continue;
          double gv = gradient(std::size_t(xx), std::size_t(yy));
          if (gv < best) {
            best = gv;
            bx = std::size_t(xx);
            by = std::size_t(yy);
          }
        }
      }
      const Lab& c = lab[by * w + bx];
      centers.push_back({c.l, c.a, c.b, double(bx), double(by)});
    }
  }

  const double spatial = (cfg.compactness / double(s)) * (cfg.compactness / double(s));
  Grid<SuperpixelId> labels(w, h, -1);
  std::vector<double> dist(w * h);
  const auto reach = static_cast<double>(s);

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      auto x_lo = static_cast<std::size_t>(std::max(0.0, std::ceil(c.x - reach)));
      auto y_lo = static_cast<std::size_t>(std::max(0.0, std::ceil(c.y - reach)));
      auto x_hi = static_cast<std::size_t>(std::min(double(w - 1), std::floor(c.x + reach)));
      auto y_hi = static_cast<std::size_t>(std::min(double(h - 1), std::floor(c.y + reach)));
      for (std::size_t y = y_lo; y <= y_hi; ++y) {
        for (std::size_t x = x_lo; x <= x_hi; ++x) {
          const std::size_t p = y * w + x;
          const double dx = double(x) - c.x, dy = double(y) - c.y;
          const double d = slic_detail::lab_dist2(lab[p], c) + (dx * dx + dy * dy) * spatial;
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = static_cast<SuperpixelId>(k);
          }
        }
      }
    }
    // Pixels outside every window (possible only after centres drift) go to
    // the spatially nearest centre.
    for (std::size_t p = 0; p < w * h; ++p) {
      if (labels[p] >= 0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < centers.size(); ++k) {
        double dx = double(p % w) - centers[k].x, dy = double(p / w) - centers[k].y;
        if (dx * dx + dy * dy < best) {
          best = dx * dx + dy * dy;
          labels[p] = static_cast<SuperpixelId>(k);
        }
      }
    }

    std::vector<Center> sum(centers.size(), Center{0, 0, 0, 0, 0});
    std::vector<std::size_t> n(centers.size(), 0);
    for (std::size_t p = 0; p < w * h; ++p) {
      auto k = static_cast<std::size_t>(labels[p]);
      sum[k].l += lab[p].l;
      sum[k].a += lab[p].a;
      sum[k].b += lab[p].b;
      sum[k].x += double(p % w);
      sum[k].y += double(p / w);
      ++n[k];
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (n[k] == 0) continue;
      const double inv = 1.0 / double(n[k]);
      centers[k] = {sum[k].l * inv, sum[k].a * inv, sum[k].b * inv, sum[k].x * inv,
                    sum[k].y * inv};
    }
  }

  return enforce_connectivity(labels, cfg.min_region_pixels());
}

}  // namespace clothparse
