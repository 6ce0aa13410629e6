#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/gate/loss.hpp"

namespace clothparse {

struct GradCheckReport {
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Worst coordinate.
  std::string worst_block;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  std::string describe() const {
    return (passed ? "gradient check passed" : "gradient check FAILED") +
           std::string(": max rel error ") + std::to_string(max_rel_error) + " at " +
           worst_block + "[" + std::to_string(worst_index) + "] (analytic " +
           std::to_string(worst_analytic) + ", numeric " + std::to_string(worst_numeric) +
           ", " + std::to_string(checked) + " coordinates)";
  }
};

namespace grad_detail {

// dataset_loss(...).total evaluated in scalar type T. Loss only, no
// gradient. The finite differences use long double so that roundoff in
// L(t+h) - L(t-h) stays well below the tolerance for coordinates whose
// gradient is near the 1e-8 floor of the relative error.
template <typename T>
T loss_total(const std::vector<Sample>& samples, const ToyModelParams& m, double lambda,
             LossMode mode) {
  if (samples.empty()) throw InvalidArgument("loss: no samples");
  const std::size_t labels = m.labels(), d = m.feature_dim();
  const bool use_enc = mode != LossMode::ungated;
  const bool use_seg = mode != LossMode::encoder_only;
  const T weight = mode == LossMode::joint ? T(lambda) : T(1);
  T sum = 0;
  for (const auto& s : samples) {
    const std::size_t n = s.features.pixels();
    std::vector<T> gate(labels, T(1));
    T enc_loss = 0;
    if (use_enc) {
      std::vector<T> pooled(d, T(0));
      for (std::size_t k = 0; k < d; ++k) {
        for (double v : s.features.channel(k)) pooled[k] += T(v);
        pooled[k] /= T(n);
      }
      std::vector<T> hidden(kEncoderHidden);
      for (std::size_t u = 0; u < kEncoderHidden; ++u) {
        T a = T(m.fc1_b.data[u]);
        for (std::size_t k = 0; k < d; ++k) a += T(m.fc1_w(u, k)) * pooled[k];
        hidden[u] = a > 0 ? a : T(0);
      }
      for (std::size_t l = 0; l < labels; ++l) {
        T z = T(m.fc2_b.data[l]);
        for (std::size_t u = 0; u < kEncoderHidden; ++u) z += T(m.fc2_w(l, u)) * hidden[u];
        const T y = T(s.presence[l]);
        enc_loss += (std::max(z, T(0)) - z * y + std::log1p(std::exp(-std::abs(z)))) / T(labels);
        if (mode == LossMode::joint) {
          gate[l] = z >= 0 ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
        }
      }
    }
    T seg = 0;
    if (use_seg) {
      std::vector<T> g(labels);
      for (std::size_t p = 0; p < n; ++p) {
        T mx = -INFINITY;
        for (std::size_t l = 0; l < labels; ++l) {
          T f = T(m.trunk_b.data[l]);
          for (std::size_t k = 0; k < d; ++k) f += T(m.trunk_w(l, k)) * T(s.features.at(k, p));
          g[l] = gate[l] * f;
          mx = std::max(mx, g[l]);
        }
        T z = 0;
        for (std::size_t l = 0; l < labels; ++l) z += std::exp(g[l] - mx);
        seg += (mx + std::log(z) - g[s.gt[p]]) / T(n);
      }
    }
    sum += (seg + (use_enc ? weight * enc_loss : T(0))) / T(samples.size());
  }
  return sum;
}

}  // namespace grad_detail

inline double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

// Compares a supplied analytic gradient against central differences
// (L(t+h) - L(t-h)) / 2h over every coordinate the mode trains.
inline GradCheckReport compare_gradients(const ToyModelParams& params,
                                         const std::vector<Sample>& samples, double lambda,
                                         LossMode mode, const ToyModelParams& analytic,
                                         double h = 1e-5, double tol = 1e-4) {
  if (!(h >= 1e-6 && h <= 1e-4)) throw InvalidArgument("grad_check: h must lie in [1e-6, 1e-4]");
  GradCheckReport rep;
  ToyModelParams probe = params;
  auto probe_blocks = probe.blocks();
  auto grad_blocks = analytic.blocks();
  for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
    ParamTensor& t = *probe_blocks[b];
    if (!block_trained(t.name, mode)) continue;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const double orig = t.data[i];
      t.data[i] = orig + h;
      const long double up = grad_detail::loss_total<long double>(samples, probe, lambda, mode);
      t.data[i] = orig - h;
      const long double down = grad_detail::loss_total<long double>(samples, probe, lambda, mode);
      t.data[i] = orig;
      // The probe coordinates are exact doubles, so divide by their actual spacing.
      const double numeric = double((up - down) / ((long double)(orig + h) - (long double)(orig - h)));
      const double a = grad_blocks[b]->data[i];
      const double err = relative_error(a, numeric);
      ++rep.checked;
      if (err > rep.max_rel_error || rep.checked == 1) {
        rep.max_rel_error = err;
        rep.worst_block = t.name;
        rep.worst_index = i;
        rep.worst_analytic = a;
        rep.worst_numeric = numeric;
      }
    }
  }
  rep.passed = rep.max_rel_error <= tol;
  return rep;
}

// Checks the backward pass of dataset_loss against finite differences.
inline GradCheckReport grad_check(const ToyModelParams& params, const std::vector<Sample>& samples,
                                  double lambda, LossMode mode, double h = 1e-5,
                                  double tol = 1e-4) {
  ToyModelParams analytic;
  dataset_loss(samples, params, lambda, mode, &analytic);
  return compare_gradients(params, samples, lambda, mode, analytic, h, tol);
}

}  // namespace clothparse
