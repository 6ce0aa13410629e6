#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/presence.hpp"

namespace clothparse {

struct ClassConfusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

struct OutfitReport {
  std::vector<ClassConfusion> per_class;
  // Macro averages over all classes.
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;

  nlohmann::json to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t c = 0; c < per_class.size(); ++c) {
      const auto& k = per_class[c];
      classes.push_back({{"index", c}, {"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn}, {"tn", k.tn},
                         {"accuracy", k.accuracy}, {"precision", k.precision},
                         {"recall", k.recall}, {"f1", k.f1}});
    }
    return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall},
            {"f1", f1}, {"classes", classes}};
  }
};

// Image-level presence prediction quality. Confidences >= threshold count as
// positive. Zero denominators give 0 for precision, recall and F1.
inline OutfitReport outfit_report(std::span<const PresenceVector> predicted,
                                  std::span<const PresenceVector> truth, double threshold = 0.5) {
  if (predicted.size() != truth.size()) throw InvalidArgument("outfit_report: length mismatch");
  if (predicted.empty()) throw InvalidArgument("outfit_report: no images");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("outfit_report: threshold must be in (0,1)");
  const std::size_t labels = truth.front().size();
  OutfitReport r;
  r.per_class.resize(labels);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].size() != labels || truth[i].size() != labels) {
      throw InvalidArgument("outfit_report: vector length mismatch at image " + std::to_string(i));
    }
    for (std::size_t c = 0; c < labels; ++c) {
      const bool p = predicted[i].present(c, threshold);
      const bool t = truth[i].present(c);
      auto& k = r.per_class[c];
      (p ? (t ? k.tp : k.fp) : (t ? k.fn : k.tn)) += 1;
    }
  }
  const double n = double(predicted.size());
  for (auto& k : r.per_class) {
    k.accuracy = double(k.tp + k.tn) / n;
    k.precision = k.tp + k.fp ? double(k.tp) / double(k.tp + k.fp) : 0.0;
    k.recall = k.tp + k.fn ? double(k.tp) / double(k.tp + k.fn) : 0.0;
    k.f1 = k.precision + k.recall > 0 ? 2 * k.precision * k.recall / (k.precision + k.recall) : 0.0;
    r.accuracy += k.accuracy / double(labels);
    r.precision += k.precision / double(labels);
    r.recall += k.recall / double(labels);
    r.f1 += k.f1 / double(labels);
  }
  return r;
}

}  // namespace clothparse
