#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "clothparse/tensor.hpp"

namespace clothparse {

using SuperpixelId = std::int32_t;

// Per-pixel superpixel ids, compact in 0..count-1.
struct SuperpixelMap {
  Grid<SuperpixelId> ids;
  std::size_t count = 0;

  std::size_t width() const { return ids.width(); }
  std::size_t height() const { return ids.height(); }
  friend bool operator==(const SuperpixelMap&, const SuperpixelMap&) = default;
};

namespace sp_detail {

// 4-connected components in scan order. Returns the component index per pixel.
template <typename T>
std::vector<std::size_t> label_components(const Grid<T>& g, std::vector<std::size_t>& sizes) {
  const std::size_t w = g.width(), h = g.height();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(w * h, unset);
  std::vector<std::size_t> stack;
  sizes.clear();
  for (std::size_t start = 0; start < w * h; ++start) {
    if (comp[start] != unset) continue;
    const std::size_t c = sizes.size();
    std::size_t n = 0;
    comp[start] = c;
    stack.push_back(start);
    while (!stack.empty()) {
      std::size_t p = stack.back();
      stack.pop_back();
      ++n;
      std::size_t x = p % w, y = p / w;
      auto visit = [&](std::size_t q) {
        if (comp[q] == unset && g[q] == g[p]) {
          comp[q] = c;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    sizes.push_back(n);
  }
  return comp;
}

}  // namespace sp_detail

// Makes every id 4-connected. Components smaller than min_size pixels are
// absorbed into their largest neighbouring component (smallest first, until
// none remain or the image is a single component). For each id its largest
// component keeps the id; other surviving pieces get fresh ids. Ids are then
// compacted preserving order, so an already-valid map is returned unchanged.
inline SuperpixelMap enforce_connectivity(const Grid<SuperpixelId>& ids, std::size_t min_size) {
  const std::size_t w = ids.width(), h = ids.height();
  std::vector<std::size_t> size;
  auto comp = sp_detail::label_components(ids, size);
  const std::size_t nc = size.size();

  std::vector<SuperpixelId> comp_id(nc);
  for (std::size_t p = 0; p < w * h; ++p) comp_id[comp[p]] = ids[p];

  // Largest component per id (first in scan order on ties).
  std::map<SuperpixelId, std::size_t> primary;
  for (std::size_t c = 0; c < nc; ++c) {
    auto [it, inserted] = primary.try_emplace(comp_id[c], c);
    if (!inserted && size[c] > size[it->second]) it->second = c;
  }

  std::vector<std::set<std::size_t>> adj(nc);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::size_t p = y * w + x;
      if (x + 1 < w && comp[p] != comp[p + 1]) {
        adj[comp[p]].insert(comp[p + 1]);
        adj[comp[p + 1]].insert(comp[p]);
      }
      if (y + 1 < h && comp[p] != comp[p + w]) {
        adj[comp[p]].insert(comp[p + w]);
        adj[comp[p + w]].insert(comp[p]);
      }
    }
  }

  std::vector<std::size_t> parent(nc);
  for (std::size_t c = 0; c < nc; ++c) parent[c] = c;
  auto find = [&](std::size_t c) {
    while (parent[c] != c) c = parent[c] = parent[parent[c]];
    return c;
  };

  using Entry = std::pair<std::size_t, std::size_t>;  // (size, component)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> small;
  for (std::size_t c = 0; c < nc; ++c)
    if (size[c] < min_size) small.emplace(size[c], c);

  while (!small.empty()) {
    auto [sz, c] = small.top();
    small.pop();
    if (find(c) != c || size[c] != sz || adj[c].empty()) continue;
    std::size_t target = 0;
    bool found = false;
    for (std::size_t n : adj[c]) {
      if (!found || size[n] > size[target] || (size[n] == size[target] && n < target)) {
        target = n;
        found = true;
      }
    }
    parent[c] = target;
    size[target] += size[c];
    adj[target].erase(c);
    for (std::size_t n : adj[c]) {
      if (n == target) continue;
      adj[target].insert(n);
      adj[n].erase(c);
      adj[n].insert(target);
    }
    adj[c].clear();
    if (size[target] < min_size) small.emplace(size[target], target);
  }

  // Assign final ids to surviving roots.
  SuperpixelId next_fresh = 0;
  for (const auto& [id, c] : primary) next_fresh = std::max(next_fresh, id + 1);
  std::vector<SuperpixelId> root_id(nc, -1);
  for (std::size_t c = 0; c < nc; ++c) {
    if (find(c) != c) continue;
    root_id[c] = primary.at(comp_id[c]) == c ? comp_id[c] : next_fresh++;
  }

  std::vector<SuperpixelId> used;
  for (std::size_t c = 0; c < nc; ++c)
    if (root_id[c] >= 0) used.push_back(root_id[c]);
  std::sort(used.begin(), used.end());
  std::map<SuperpixelId, SuperpixelId> compact;
  for (std::size_t i = 0; i < used.size(); ++i) compact[used[i]] = static_cast<SuperpixelId>(i);

  SuperpixelMap out{Grid<SuperpixelId>(w, h), used.size()};
  for (std::size_t p = 0; p < w * h; ++p) out.ids[p] = compact.at(root_id[find(comp[p])]);
  return out;
}

}  // namespace clothparse
