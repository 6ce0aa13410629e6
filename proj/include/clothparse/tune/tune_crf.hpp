#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clothparse/crf/map.hpp"
#include "clothparse/crf/mean_field.hpp"
#include "clothparse/crf/params.hpp"
#include "clothparse/error.hpp"
#include "clothparse/metrics/iou.hpp"
#include "clothparse/softmax.hpp"
#include "clothparse/tune/nelder_mead.hpp"

namespace clothparse {

struct ValidationItem {
  std::string id;
  ProbMaps unary;  // softmax of the (possibly gated) heatmaps
  RgbImage image;
  LabelMask gt;
};

inline ValidationItem make_validation_item(std::string id, const HeatmapStack& heatmaps,
                                           RgbImage image, LabelMask gt) {
  return {std::move(id), softmax_probmaps(heatmaps), std::move(image), std::move(gt)};
}

struct CrfObjectiveConfig {
  std::size_t iterations = 10;
  MeanFieldMode mode = MeanFieldMode::parallel;
};

// Mean IoU over the validation set of the CRF-refined, decoded predictions.
inline double crf_objective(const std::vector<ValidationItem>& items, const CrfParams& params,
                            std::size_t labels, const CrfObjectiveConfig& cfg = {}) {
  std::vector<LabelMask> preds, gts;
  for (const auto& it : items) {
    try {
      CrfInstance inst(it.unary, it.image, params);
      preds.push_back(decode_map(mean_field_infer(inst, cfg.iterations, cfg.mode)));
      gts.push_back(it.gt);
    } catch (const std::exception& ex) {
      throw Error("crf objective failed on item " + it.id + ": " + ex.what());
    }
  }
  return iou_report(preds, gts, labels).mean_iou;
}

struct TuneResult {
  CrfParams params;
  double objective = 0.0;
  double initial_objective = 0.0;
  std::size_t evaluations = 0;
};

inline std::vector<double> crf_to_vector(const CrfParams& p) {
  return {p.w1, p.w2, p.sigma_position, p.sigma_color, p.sigma_smooth};
}

inline CrfParams crf_from_vector(const std::vector<double>& v) {
  return {v[0], v[1], v[2], v[3], v[4]};
}

// Maximises the validation mean IoU with Nelder-Mead over the logarithms of
// the five parameters, starting from `initial` with a +20% simplex step per
// coordinate. Mean IoU of a decoded labeling is piecewise constant, so a
// derivative-free search is used. Returns the best parameters evaluated.
inline TuneResult tune_crf(const std::vector<ValidationItem>& items, const CrfParams& initial,
                           std::size_t budget, std::size_t labels,
                           const CrfObjectiveConfig& cfg = {}) {
  if (items.empty()) throw InvalidArgument("tune_crf: empty validation set");
  if (budget < 1) throw InvalidArgument("tune_crf: budget must be >= 1");
  initial.validate();
  std::vector<double> x0 = crf_to_vector(initial);
  for (double& v : x0) {
    if (!(v > 0)) throw InvalidArgument("tune_crf: log-space search needs strictly positive start");
    v = std::log(v);
  }
  TuneResult r;
  bool first = true;
  auto objective = [&](const std::vector<double>& x) {
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = std::exp(x[i]);
    const double v = crf_objective(items, crf_from_vector(p), labels, cfg);
    if (first) {
      r.initial_objective = v;
      first = false;
    }
    return -v;
  };
  auto nm = nelder_mead(objective, x0, std::vector<double>(5, std::log(1.2)), budget);
  std::vector<double> best(5);
  for (std::size_t i = 0; i < 5; ++i) best[i] = std::exp(nm.best_x[i]);
  r.params = crf_from_vector(best);
  r.objective = -nm.best_value;
  r.evaluations = nm.evaluations;
  return r;
}

}  // namespace clothparse
