#pragma once

#include <cmath>

#include "clothparse/error.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

// Per-pixel softmax over labels with max subtraction, so arbitrarily large
// score gaps neither overflow nor produce NaN.
template <typename T>
ProbMaps softmax_probmaps(const Tensor3<T>& scores) {
  const std::size_t labels = scores.channels();
  const std::size_t n = scores.pixels();
  ProbMaps out(labels, scores.height(), scores.width());
  if (labels == 0) return out;
  for (std::size_t p = 0; p < n; ++p) {
    double mx = -INFINITY;
    for (std::size_t l = 0; l < labels; ++l) {
      double v = static_cast<double>(scores.at(l, p));
      if (!std::isfinite(v)) throw InvalidArgument("softmax: non-finite score");
      mx = std::max(mx, v);
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < labels; ++l) {
      double e = std::exp(static_cast<double>(scores.at(l, p)) - mx);
      out.at(l, p) = e;
      sum += e;
    }
    for (std::size_t l = 0; l < labels; ++l) out.at(l, p) /= sum;
  }
  return out;
}

}  // namespace clothparse
