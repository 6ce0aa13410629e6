#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "clothparse/error.hpp"

namespace clothparse {

struct NelderMeadResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  std::size_t evaluations = 0;
};

// Derivative-free minimisation with the standard reflection (1), expansion
// (2), contraction (1/2) and shrink (1/2) coefficients. Stops after exactly
// `budget` objective evaluations (or earlier if the simplex collapses), and
// returns the best point ever evaluated. The evaluation sequence does not
// depend on the budget, so a larger budget never returns a worse point.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& step,
                                    std::size_t budget) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw InvalidArgument("nelder_mead: bad dimensions");
  if (budget < 1) throw InvalidArgument("nelder_mead: budget must be >= 1");

  NelderMeadResult res;
  bool have_best = false;
  auto eval = [&](const std::vector<double>& x, double& out) {
    if (res.evaluations >= budget) return false;
    out = f(x);
    ++res.evaluations;
    if (!have_best || out < res.best_value) {
      res.best_value = out;
      res.best_x = x;
      have_best = true;
    }
    return true;
  };

  std::vector<std::vector<double>> simplex{x0};
  for (std::size_t i = 0; i < n; ++i) {
    auto v = x0;
    v[i] += step[i];
    simplex.push_back(std::move(v));
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    if (!eval(simplex[i], fv[i])) return res;

  std::vector<std::size_t> order(n + 1);
  auto lerp = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (auto i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(fv[i]);
      }
      simplex.swap(s2);
      fv.swap(f2);
    }
    double spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::abs(simplex[i][k] - simplex[0][k]));
    if (spread < 1e-12) return res;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / double(n);

    const auto& worst = simplex[n];
    auto reflected = lerp(centroid, worst, -1.0);
    double fr;
    if (!eval(reflected, fr)) return res;
    if (fr < fv[0]) {
      auto expanded = lerp(centroid, worst, -2.0);
      double fe;
      if (!eval(expanded, fe)) return res;
      if (fe < fr) {
        simplex[n] = expanded;
        fv[n] = fe;
      } else {
        simplex[n] = reflected;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = reflected;
      fv[n] = fr;
      continue;
    }
    const bool outside = fr < fv[n];
    auto contracted = outside ? lerp(centroid, reflected, 0.5) : lerp(centroid, worst, 0.5);
    double fc;
    if (!eval(contracted, fc)) return res;
    if (fc < (outside ? fr : fv[n])) {
      simplex[n] = contracted;
      fv[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      simplex[i] = lerp(simplex[0], simplex[i], 0.5);
      if (!eval(simplex[i], fv[i])) return res;
    }
  }
}

}  // namespace clothparse
