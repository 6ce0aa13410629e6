#pragma once

// Random generators and reference implementations shared by the unit tests
// and the acceptance runner. The reference implementations are deliberately
// naive and do not call into the library code they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "clothparse/clothparse.hpp"

namespace testsupport {

using namespace clothparse;

inline std::filesystem::path data_dir() { return CLOTHPARSE_DATA_DIR; }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("clothparse-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline RgbImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> u(0, 255);
  RgbImage img(w, h);
  for (auto& px : img.values()) {
    px = {std::uint8_t(u(rng)), std::uint8_t(u(rng)), std::uint8_t(u(rng))};
  }
  return img;
}

// Piecewise-constant image of a few random rectangles plus mild noise.
inline RgbImage blocky_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> u(0, 255);
  RgbImage img(w, h, Rgb{std::uint8_t(u(rng)), std::uint8_t(u(rng)), std::uint8_t(u(rng))});
  for (int r = 0; r < 4; ++r) {
    std::size_t x0 = rng() % w, y0 = rng() % h;
    std::size_t x1 = x0 + 1 + rng() % (w - x0), y1 = y0 + 1 + rng() % (h - y0);
    Rgb c{std::uint8_t(u(rng)), std::uint8_t(u(rng)), std::uint8_t(u(rng))};
    for (std::size_t y = y0; y < y1; ++y)
      for (std::size_t x = x0; x < x1; ++x) img(x, y) = c;
  }
  std::uniform_int_distribution<int> n(-6, 6);
  for (auto& px : img.values()) {
    auto clamp = [](int v) { return std::uint8_t(std::min(255, std::max(0, v))); };
    px = {clamp(px.r + n(rng)), clamp(px.g + n(rng)), clamp(px.b + n(rng))};
  }
  return img;
}

inline LabelMask random_mask(std::mt19937_64& rng, std::size_t w, std::size_t h, std::size_t labels) {
  LabelMask m(w, h);
  for (auto& v : m.values()) v = Label(rng() % labels);
  return m;
}

inline HeatmapStack random_heatmaps(std::mt19937_64& rng, std::size_t labels, std::size_t h,
                                    std::size_t w, double scale = 2.0) {
  std::normal_distribution<double> nd(0.0, scale);
  HeatmapStack s(labels, h, w);
  for (auto& v : s.values()) v = float(nd(rng));
  return s;
}

// Per-pixel normalised positive probabilities.
inline ProbMaps random_probmaps(std::mt19937_64& rng, std::size_t labels, std::size_t h,
                                std::size_t w) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ProbMaps p(labels, h, w);
  for (std::size_t px = 0; px < h * w; ++px) {
    double s = 0;
    for (std::size_t l = 0; l < labels; ++l) s += (p.at(l, px) = u(rng));
    for (std::size_t l = 0; l < labels; ++l) p.at(l, px) /= s;
  }
  return p;
}

// Parameters drawn log-uniformly within a factor of three of (10,10,30,10,3).
inline CrfParams random_params_near_default(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(1.0 / 3.0), std::log(3.0));
  return {10 * std::exp(u(rng)), 10 * std::exp(u(rng)), 30 * std::exp(u(rng)),
          10 * std::exp(u(rng)), 3 * std::exp(u(rng))};
}

// Energy by the textbook formula: sum of -log P over pixels plus, for every
// unordered pair with different labels, w1 g1 + w2 g2.
inline double reference_energy(const std::vector<int>& x, const ProbMaps& unary,
                               const RgbImage& img, const CrfParams& p) {
  const std::size_t w = img.width(), n = x.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e -= std::log(std::max(unary.at(x[i], i), 1e-10));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[i] == x[j]) continue;
      double xi = double(i % w), yi = double(i / w), xj = double(j % w), yj = double(j / w);
      double d2 = (xi - xj) * (xi - xj) + (yi - yj) * (yi - yj);
      double c2 = std::pow(img[i].r - img[j].r, 2) + std::pow(img[i].g - img[j].g, 2) +
                  std::pow(img[i].b - img[j].b, 2);
      e += p.w1 * std::exp(-d2 / (p.sigma_position * p.sigma_position) -
                           c2 / (p.sigma_color * p.sigma_color)) +
           p.w2 * std::exp(-d2 / (p.sigma_smooth * p.sigma_smooth));
    }
  }
  return e;
}

// Minimum energy over all labelings by recursive enumeration.
inline double reference_min_energy(const ProbMaps& unary, const RgbImage& img, const CrfParams& p) {
  const std::size_t n = unary.pixels(), labels = unary.channels();
  std::vector<int> x(n, 0);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      best = std::min(best, reference_energy(x, unary, img, p));
      return;
    }
    for (std::size_t l = 0; l < labels; ++l) {
      x[i] = int(l);
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return best;
}

inline std::vector<int> to_vector(const LabelMask& m) {
  return std::vector<int>(m.values().begin(), m.values().end());
}

// Number of 4-connected components of each id (BFS flood fill).
inline std::vector<std::size_t> component_counts(const Grid<SuperpixelId>& ids, std::size_t count) {
  const std::size_t w = ids.width(), h = ids.height();
  std::vector<std::size_t> comps(count, 0);
  std::vector<char> seen(w * h, 0);
  for (std::size_t s = 0; s < w * h; ++s) {
    if (seen[s]) continue;
    ++comps.at(std::size_t(ids[s]));
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      std::size_t p = q.front();
      q.pop();
      std::size_t x = p % w, y = p / w;
      auto visit = [&](std::size_t np) {
        if (!seen[np] && ids[np] == ids[p]) {
          seen[np] = 1;
          q.push(np);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
  }
  return comps;
}

// Identical partitions up to relabeling.
inline bool same_partition(const Grid<SuperpixelId>& a, const Grid<SuperpixelId>& b) {
  if (a.size() != b.size()) return false;
  std::map<SuperpixelId, SuperpixelId> ab, ba;
  for (std::size_t p = 0; p < a.size(); ++p) {
    auto [i, ins] = ab.emplace(a[p], b[p]);
    auto [j, ins2] = ba.emplace(b[p], a[p]);
    if (i->second != b[p] || j->second != a[p]) return false;
  }
  return true;
}

}  // namespace testsupport
