#pragma once

#include <cmath>

#include "clothparse/crf/instance.hpp"
#include "clothparse/error.hpp"

namespace clothparse {

inline void check_labeling(const LabelMask& x, const CrfInstance& inst) {
  if (x.width() != inst.width() || x.height() != inst.height()) {
    throw InvalidArgument("crf: labeling dimensions differ from instance");
  }
  for (Label v : x.values()) {
    if (v >= inst.labels()) throw InvalidArgument("crf: labeling uses an unknown label");
  }
}

// E(x) = sum_i phi_i(x_i) + sum_{i<j, x_i != x_j} (w1 g1 + w2 g2). Exact
// O(N^2) evaluation; meant for small instances.
inline double energy(const LabelMask& x, const CrfInstance& inst) {
  check_labeling(x, inst);
  const std::size_t n = inst.pixels();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += inst.unary_cost(x[i], i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (x[i] != x[j]) e += inst.pairwise(i, j);
  return e;
}

inline void check_normalized(const ProbMaps& q, double tol = 1e-6) {
  for (std::size_t p = 0; p < q.pixels(); ++p) {
    double sum = 0;
    for (std::size_t l = 0; l < q.channels(); ++l) {
      double v = q.at(l, p);
      if (!(v >= -tol && v <= 1.0 + tol)) throw InvalidArgument("probabilities outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) throw InvalidArgument("probabilities not normalized");
  }
}

// Mean-field free energy of a factorised distribution Q:
//   sum_i sum_l Q_i(l) phi_i(l)
// + sum_{i<j} k_ij * P[x_i != x_j under Q]
// + sum_i sum_l Q_i(l) ln Q_i(l)        (0 ln 0 = 0)
inline double free_energy(const ProbMaps& q, const CrfInstance& inst) {
  if (q.channels() != inst.labels() || q.width() != inst.width() ||
      q.height() != inst.height()) {
    throw InvalidArgument("free_energy: Q shape differs from instance");
  }
  check_normalized(q);
  const std::size_t n = inst.pixels(), labels = inst.labels();
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < labels; ++l) {
      const double v = q.at(l, i);
      f += v * inst.unary_cost(l, i);
      if (v > 0) f += v * std::log(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = inst.pairwise(i, j);
      if (k == 0.0) continue;
      double same = 0.0;
      for (std::size_t l = 0; l < labels; ++l) same += q.at(l, i) * q.at(l, j);
      f += k * (1.0 - same);
    }
  }
  return f;
}

}  // namespace clothparse
