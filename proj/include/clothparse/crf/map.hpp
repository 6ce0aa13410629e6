#pragma once

#include <cmath>
#include <vector>

#include "clothparse/crf/energy.hpp"
#include "clothparse/crf/instance.hpp"
#include "clothparse/error.hpp"

namespace clothparse {

// Per-pixel argmax; exact ties resolve to the lowest label index.
inline LabelMask decode_map(const ProbMaps& q) {
  if (q.channels() > 256) throw InvalidArgument("decode_map: more than 256 labels");
  LabelMask out(q.width(), q.height());
  for (std::size_t p = 0; p < q.pixels(); ++p) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < q.channels(); ++l)
      if (q.at(l, p) > q.at(best, p)) best = l;
    out[p] = static_cast<Label>(best);
  }
  return out;
}

inline constexpr double kMaxBruteForceLabelings = 1e6;

// Exact argmin of the energy by enumeration. Labelings are visited in
// lexicographic order (pixel 0 most significant) and only a strictly lower
// energy replaces the incumbent, so ties go to the smallest labeling.
inline LabelMask brute_force_map(const CrfInstance& inst) {
  const std::size_t n = inst.pixels(), labels = inst.labels();
  if (std::pow(double(labels), double(n)) > kMaxBruteForceLabelings) {
    throw InvalidArgument("brute_force_map: instance too large to enumerate");
  }
  std::vector<double> k(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k[i * n + j] = inst.pairwise(i, j);

  auto eval = [&](const std::vector<std::size_t>& x) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += inst.unary_cost(x[i], i);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (x[i] != x[j]) e += k[i * n + j];
    return e;
  };

  std::vector<std::size_t> x(n, 0), best = x;
  double best_e = eval(x);
  while (true) {
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++x[pos] < labels) break;
      x[pos] = 0;
      if (pos == 0) {
        pos = n;
        break;
      }
    }
    if (pos == n) break;
    const double e = eval(x);
    if (e < best_e) {
      best_e = e;
      best = x;
    }
  }

  LabelMask out(inst.width(), inst.height());
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Label>(best[i]);
  return out;
}

}  // namespace clothparse
