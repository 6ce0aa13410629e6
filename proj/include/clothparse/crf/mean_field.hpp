#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "clothparse/crf/instance.hpp"

namespace clothparse {

enum class MeanFieldMode {
  parallel,    // every pixel updated from the previous sweep's Q
  sequential,  // row-major, each update sees the freshest Q
};

namespace mf_detail {

// Q_i(l) <- exp(-phi_i(l) + m(l)) / Z, with m(l) = sum_j k_ij Q_j(l). The
// omitted per-pixel constant sum_j k_ij cancels in the normalisation.
inline void update_pixel(const CrfInstance& inst, std::size_t i, const double* message,
                         ProbMaps& q) {
  const std::size_t labels = inst.labels();
  double mx = -INFINITY;
  std::vector<double> logit(labels);
  for (std::size_t l = 0; l < labels; ++l) {
    logit[l] = -inst.unary_cost(l, i) + message[l];
    mx = std::max(mx, logit[l]);
  }
  double z = 0.0;
  for (std::size_t l = 0; l < labels; ++l) {
    logit[l] = std::exp(logit[l] - mx);
    z += logit[l];
  }
  for (std::size_t l = 0; l < labels; ++l) q.at(l, i) = logit[l] / z;
}

}  // namespace mf_detail

// One mean-field sweep in place.
inline void mean_field_sweep(const CrfInstance& inst, ProbMaps& q, MeanFieldMode mode) {
  const std::size_t n = inst.pixels(), labels = inst.labels();
  if (mode == MeanFieldMode::parallel) {
    std::vector<double> msg(n * labels, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double k = inst.pairwise(i, j);
        if (k == 0.0) continue;
        for (std::size_t l = 0; l < labels; ++l) {
          msg[i * labels + l] += k * q.at(l, j);
          msg[j * labels + l] += k * q.at(l, i);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) mf_detail::update_pixel(inst, i, &msg[i * labels], q);
  } else {
    std::vector<double> msg(labels);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(msg.begin(), msg.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double k = inst.pairwise(i, j);
        if (k == 0.0) continue;
        for (std::size_t l = 0; l < labels; ++l) msg[l] += k * q.at(l, j);
      }
      mf_detail::update_pixel(inst, i, msg.data(), q);
    }
  }
}

// Approximate marginals of the CRF. With zero iterations the unary
// probabilities are returned as given, and likewise when both kernel weights
// are zero (the model then has no pairwise terms).
inline ProbMaps mean_field_infer(const CrfInstance& inst, std::size_t iterations = 10,
                                 MeanFieldMode mode = MeanFieldMode::parallel) {
  ProbMaps q = inst.unary();
  if (inst.params().w1 == 0.0 && inst.params().w2 == 0.0) return q;
  for (std::size_t it = 0; it < iterations; ++it) mean_field_sweep(inst, q, mode);
  return q;
}

}  // namespace clothparse
