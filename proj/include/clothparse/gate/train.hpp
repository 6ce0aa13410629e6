#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/gate/loss.hpp"
#include "clothparse/gate/model.hpp"
#include "clothparse/manifest.hpp"
#include "clothparse/png_io.hpp"

namespace clothparse {

struct TrainSchedule {
  double step = 0.1;
  std::size_t epochs_trunk = 200;    // stage A: trunk alone, ungated
  std::size_t epochs_encoder = 200;  // stage B: encoder alone, trunk frozen
  std::size_t epochs_joint = 200;    // stage C: everything, joint loss
  double lambda = 1.0;
  std::uint64_t seed = 0;
};

struct StageLosses {
  double train = 0.0;
  double val = 0.0;
};

struct TrainResult {
  ToyModelParams model;
  // Validation numbers are the segmentation CE of the model as it would be
  // used at that point: ungated after stage A, gated after stage C.
  StageLosses after_trunk;
  StageLosses after_encoder;  // encoder presence CE
  StageLosses after_joint;
};

namespace train_detail {

inline void descend(ToyModelParams& m, const ToyModelParams& grad, LossMode mode, double step) {
  auto mb = m.blocks();
  auto gb = grad.blocks();
  for (std::size_t b = 0; b < mb.size(); ++b) {
    if (!block_trained(mb[b]->name, mode)) continue;
    for (std::size_t i = 0; i < mb[b]->data.size(); ++i) mb[b]->data[i] -= step * gb[b]->data[i];
  }
}

inline void run_stage(ToyModelParams& m, const std::vector<Sample>& train, double lambda,
                      LossMode mode, std::size_t epochs, double step, const char* stage) {
  ToyModelParams grad;
  for (std::size_t e = 0; e < epochs; ++e) {
    LossValue v = dataset_loss(train, m, lambda, mode, &grad);
    if (!std::isfinite(v.total)) {
      throw Error(std::string("training diverged in stage ") + stage + " at epoch " +
                  std::to_string(e) + " (loss " + std::to_string(v.total) + ")");
    }
    descend(m, grad, mode, step);
  }
  if (epochs > 0) {
    const double after = dataset_loss(train, m, lambda, mode).total;
    if (!std::isfinite(after)) {
      throw Error(std::string("training diverged in stage ") + stage + " after the last epoch (loss " +
                  std::to_string(after) + ")");
    }
  }
}

}  // namespace train_detail

// Stage A trains the trunk on the ungated segmentation loss, stage B trains
// only the encoder on presence targets (trunk bit-for-bit frozen), stage C
// fine-tunes everything on the joint loss. Full-batch gradient descent with
// a fixed step; deterministic for a fixed seed.
inline TrainResult train_staged(const std::vector<Sample>& train, const std::vector<Sample>& val,
                                std::size_t labels, const TrainSchedule& schedule) {
  if (train.empty() || val.empty()) throw InvalidArgument("train_staged: empty train or val split");
  if (!(schedule.step > 0) || !std::isfinite(schedule.step)) {
    throw InvalidArgument("train_staged: step must be finite and > 0");
  }
  TrainResult r;
  r.model = init_model(labels, train.front().features.channels(), schedule.seed);
  using train_detail::run_stage;
  const double lam = schedule.lambda;

  run_stage(r.model, train, lam, LossMode::ungated, schedule.epochs_trunk, schedule.step, "A");
  r.after_trunk = {dataset_loss(train, r.model, lam, LossMode::ungated).segmentation,
                   dataset_loss(val, r.model, lam, LossMode::ungated).segmentation};

  run_stage(r.model, train, lam, LossMode::encoder_only, schedule.epochs_encoder, schedule.step,
            "B");
  r.after_encoder = {dataset_loss(train, r.model, lam, LossMode::encoder_only).encoder,
                     dataset_loss(val, r.model, lam, LossMode::encoder_only).encoder};

  run_stage(r.model, train, lam, LossMode::joint, schedule.epochs_joint, schedule.step, "C");
  r.after_joint = {dataset_loss(train, r.model, lam, LossMode::joint).segmentation,
                   dataset_loss(val, r.model, lam, LossMode::joint).segmentation};
  return r;
}

inline std::vector<Sample> load_samples(const std::vector<ManifestItem>& items,
                                        std::size_t labels) {
  std::vector<Sample> out;
  for (const auto& it : items) {
    out.push_back(make_sample(load_rgb(it.image), load_mask(it.mask, labels), labels));
  }
  return out;
}

inline TrainResult train_staged(const DatasetManifest& manifest, std::size_t labels,
                                const TrainSchedule& schedule) {
  return train_staged(load_samples(manifest.subset(Split::train), labels),
                      load_samples(manifest.subset(Split::val), labels), labels, schedule);
}

}  // namespace clothparse
