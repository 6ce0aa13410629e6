#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/palette.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

namespace metrics_detail {

inline void check_pairs(std::span<const LabelMask> preds, std::span<const LabelMask> gts) {
  if (preds.size() != gts.size()) throw InvalidArgument("metrics: prediction/gt count differ");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].width() != gts[i].width() || preds[i].height() != gts[i].height()) {
      throw InvalidArgument("metrics: shape mismatch at item " + std::to_string(i));
    }
  }
}

}  // namespace metrics_detail

// Correct pixels over all pixels of the whole set, background included.
inline double pixel_accuracy(std::span<const LabelMask> preds, std::span<const LabelMask> gts) {
  metrics_detail::check_pairs(preds, gts);
  std::uint64_t correct = 0, total = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t p = 0; p < preds[i].size(); ++p) correct += preds[i][p] == gts[i][p];
    total += preds[i].size();
  }
  if (total == 0) throw InvalidArgument("pixel_accuracy: no pixels");
  return double(correct) / double(total);
}

struct ClassIou {
  std::uint64_t intersection = 0;
  std::uint64_t uni = 0;
  double iou = 0.0;
};

struct IouReport {
  std::vector<ClassIou> per_class;
  double mean_iou = 0.0;  // over classes with non-empty union
  double pixel_accuracy = 0.0;
  std::vector<std::size_t> excluded;  // union 0: absent from both prediction and gt

  nlohmann::json to_json(const Palette* palette = nullptr) const {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t c = 0; c < per_class.size(); ++c) {
      nlohmann::json e{{"index", c},
                       {"intersection", per_class[c].intersection},
                       {"union", per_class[c].uni}};
      if (palette) e["name"] = (*palette)[c].name;
      if (per_class[c].uni > 0) {
        e["iou"] = per_class[c].iou;
      } else {
        e["iou"] = nullptr;
      }
      classes.push_back(e);
    }
    return {{"mean_iou", mean_iou},
            {"pixel_accuracy", pixel_accuracy},
            {"excluded", excluded},
            {"classes", classes}};
  }
};

// IoU per class over the aggregated set: |pred=c and gt=c| / |pred=c or gt=c|.
inline IouReport iou_report(std::span<const LabelMask> preds, std::span<const LabelMask> gts,
                            std::size_t labels) {
  metrics_detail::check_pairs(preds, gts);
  IouReport r;
  r.per_class.resize(labels);
  std::vector<std::uint64_t> pred_count(labels, 0), gt_count(labels, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t p = 0; p < preds[i].size(); ++p) {
      const Label a = preds[i][p], b = gts[i][p];
      if (a >= labels || b >= labels) throw InvalidArgument("iou_report: label out of range");
      ++pred_count[a];
      ++gt_count[b];
      if (a == b) ++r.per_class[a].intersection;
    }
  }
  double sum = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < labels; ++c) {
    auto& k = r.per_class[c];
    k.uni = pred_count[c] + gt_count[c] - k.intersection;
    if (k.uni == 0) {
      r.excluded.push_back(c);
      continue;
    }
    k.iou = double(k.intersection) / double(k.uni);
    sum += k.iou;
    ++included;
  }
  r.mean_iou = included ? sum / double(included) : 0.0;
  r.pixel_accuracy = pixel_accuracy(preds, gts);
  return r;
}

inline IouReport iou_report(std::span<const LabelMask> preds, std::span<const LabelMask> gts,
                            const Palette& palette) {
  return iou_report(preds, gts, palette.size());
}

}  // namespace clothparse
