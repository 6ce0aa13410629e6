#pragma once

// Command-line front end. Every subcommand reads and writes files (HMT1
// heatmaps, PNG masks, JSON), so the parsing pipeline composes as
//   infer-toy -> gate -> crf-refine -> eval

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clothparse/crf/map.hpp"
#include "clothparse/crf/mean_field.hpp"
#include "clothparse/crf/params.hpp"
#include "clothparse/gate/forward.hpp"
#include "clothparse/gate/model_io.hpp"
#include "clothparse/gate/train.hpp"
#include "clothparse/hmt1.hpp"
#include "clothparse/manifest.hpp"
#include "clothparse/metrics/iou.hpp"
#include "clothparse/metrics/outfit.hpp"
#include "clothparse/palette.hpp"
#include "clothparse/png_io.hpp"
#include "clothparse/retrieval/index.hpp"
#include "clothparse/service/server.hpp"
#include "clothparse/softmax.hpp"
#include "clothparse/superpixel/slic.hpp"
#include "clothparse/superpixel/smoothing.hpp"
#include "clothparse/synthetic/datasets.hpp"
#include "clothparse/tune/tune_crf.hpp"

namespace clothparse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

namespace fs = std::filesystem;

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw FormatError(path + ": " + ex.what());
  }
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline MeanFieldMode parse_mode(const std::string& s) {
  if (s == "parallel") return MeanFieldMode::parallel;
  if (s == "sequential") return MeanFieldMode::sequential;
  throw InvalidArgument("unknown mean-field mode " + s);
}

inline CrfParams params_or_default(const std::string& path) {
  return path.empty() ? CrfParams{} : load_crf_params(path);
}

inline std::vector<ManifestItem> items_of(const DatasetManifest& m, const std::string& split) {
  if (split == "all") return m.items();
  return m.subset(parse_split(split));
}

// Fixed-width text table with the accuracy / IoU columns of the usual
// segmentation results table, followed by per-class IoU.
inline std::string iou_table(const IouReport& r, const Palette& palette) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(24) << "Method" << std::right << std::setw(10) << "Acc"
     << std::setw(10) << "IoU" << "\n";
  os << std::left << std::setw(24) << "prediction" << std::right << std::setw(10)
     << 100.0 * r.pixel_accuracy << std::setw(10) << 100.0 * r.mean_iou << "\n\n";
  os << std::left << std::setw(24) << "class" << std::right << std::setw(10) << "IoU" << "\n";
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    os << std::left << std::setw(24) << palette[c].name << std::right << std::setw(10);
    if (r.per_class[c].uni == 0) {
      os << "-";
    } else {
      os << 100.0 * r.per_class[c].iou;
    }
    os << "\n";
  }
  return os.str();
}

struct TrainArgs {
  std::string manifest, palette, out;
  TrainSchedule schedule;
};

struct InferArgs {
  std::string model, image, out_heatmap, out_gate;
};

struct GateArgs {
  std::string heatmap, gate, out;
};

struct RefineArgs {
  std::string heatmap, image, params, out_heatmap, out_mask;
  std::size_t iterations = 10;
  std::string mode = "parallel";
};

struct TuneArgs {
  std::string manifest, heatmaps, palette, params, out, split = "val";
  std::size_t budget = 150;
  std::size_t iterations = 10;
  std::string mode = "parallel";
};

struct EvalArgs {
  std::string manifest, predictions, palette, out, table, gates, split = "test";
  double threshold = 0.5;
};

struct IndexArgs {
  std::string manifest, model, out, split = "all";
};

struct RetrieveArgs {
  std::string query, index, model;
  std::size_t k = 5;
};

struct SlicArgs {
  std::string image, out, boundaries;
  SlicConfig cfg;
};

struct SmoothArgs {
  std::string mask, palette, out;
  int radius = 1;
};

struct ServeArgs {
  std::string dir, palette, ui, host = "127.0.0.1", missing = "404";
  int port = 8080;
};

struct SynthArgs {
  std::string out, kind = "outfit";
  std::uint64_t seed = 7;
  std::size_t count = 0;
  double val_ratio = 0.2, test_ratio = 0.2;
};

inline int train_toy(const TrainArgs& a, std::ostream& out) {
  Palette palette = load_palette(a.palette);
  auto result = train_staged(load_manifest(a.manifest), palette.size(), a.schedule);
  save_model(result.model, a.out);
  out << std::setprecision(6) << "stage A (trunk)   train CE " << result.after_trunk.train
      << "  val CE " << result.after_trunk.val << "\n"
      << "stage B (encoder) train CE " << result.after_encoder.train << "  val CE "
      << result.after_encoder.val << "\n"
      << "stage C (joint)   train CE " << result.after_joint.train << "  val CE "
      << result.after_joint.val << "\n";
  return kExitOk;
}

inline int infer_toy(const InferArgs& a) {
  ToyModelParams model = load_model(a.model);
  FeatureMap f = extract_features(load_rgb(a.image));
  save_hmt1(trunk_forward(f, model), a.out_heatmap);
  if (!a.out_gate.empty()) write_json(encoder_forward(f, model).gate.to_json(), a.out_gate);
  return kExitOk;
}

inline int gate(const GateArgs& a) {
  save_hmt1(gate_heatmaps(load_hmt1(a.heatmap), GateVector::from_json(read_json(a.gate))), a.out);
  return kExitOk;
}

inline int crf_refine(const RefineArgs& a) {
  HeatmapStack h = load_hmt1(a.heatmap);
  CrfInstance inst(softmax_probmaps(h), load_rgb(a.image), params_or_default(a.params));
  ProbMaps q = mean_field_infer(inst, a.iterations, parse_mode(a.mode));
  if (!a.out_heatmap.empty()) {
    HeatmapStack logq(q.channels(), q.height(), q.width());
    for (std::size_t i = 0; i < q.size(); ++i) {
      logq.values()[i] = static_cast<float>(std::log(std::max(q.values()[i], 1e-30)));
    }
    save_hmt1(logq, a.out_heatmap);
  }
  if (!a.out_mask.empty()) save_mask(decode_map(q), a.out_mask);
  return kExitOk;
}

inline int tune(const TuneArgs& a, std::ostream& out) {
  Palette palette = load_palette(a.palette);
  DatasetManifest m = load_manifest(a.manifest);
  std::vector<ValidationItem> items;
  for (const auto& it : items_of(m, a.split)) {
    auto path = (fs::path(a.heatmaps) / (it.id + ".hmt1")).string();
    items.push_back(make_validation_item(it.id, load_hmt1(path), load_rgb(it.image),
                                         load_mask(it.mask, palette.size())));
  }
  CrfObjectiveConfig cfg{a.iterations, parse_mode(a.mode)};
  auto r = tune_crf(items, params_or_default(a.params), a.budget, palette.size(), cfg);
  save_crf_params(r.params, a.out);
  out << std::setprecision(6) << "mean IoU " << r.initial_objective << " -> " << r.objective
      << " after " << r.evaluations << " evaluations\n";
  return kExitOk;
}

inline int eval(const EvalArgs& a, std::ostream& out) {
  Palette palette = load_palette(a.palette);
  DatasetManifest m = load_manifest(a.manifest);
  std::vector<LabelMask> preds, gts;
  std::vector<PresenceVector> conf, truth;
  for (const auto& it : items_of(m, a.split)) {
    gts.push_back(load_mask(it.mask, palette.size()));
    preds.push_back(load_mask((fs::path(a.predictions) / (it.id + ".png")).string(), palette.size()));
    if (!a.gates.empty()) {
      auto g = GateVector::from_json(read_json((fs::path(a.gates) / (it.id + ".json")).string()));
      if (g.size() != palette.size()) throw FormatError("gate for " + it.id + " has wrong length");
      conf.emplace_back(g.values);
      truth.push_back(presence_vector(gts.back(), palette.size()));
    }
  }
  if (gts.empty()) throw InvalidArgument("eval: split " + a.split + " is empty");
  IouReport iou = iou_report(preds, gts, palette);
  nlohmann::json report{{"split", a.split}, {"images", gts.size()}, {"segmentation", iou.to_json(&palette)}};
  if (!conf.empty()) report["outfit"] = outfit_report(conf, truth, a.threshold).to_json();
  const std::string table = iou_table(iou, palette);
  if (!a.out.empty()) write_json(report, a.out);
  if (!a.table.empty()) {
    std::ofstream t(a.table);
    if (!t) throw IoError("cannot write " + a.table);
    t << table;
  }
  out << table;
  return kExitOk;
}

inline int build_index(const IndexArgs& a, std::ostream& out) {
  ToyModelParams model = load_model(a.model);
  DescriptorIndex idx;
  for (const auto& it : items_of(load_manifest(a.manifest), a.split)) {
    idx.add(it.id, extract_descriptor(load_rgb(it.image), model));
  }
  idx.save(a.out);
  out << "indexed " << idx.size() << " images\n";
  return kExitOk;
}

inline int retrieve(const RetrieveArgs& a, std::ostream& out) {
  DescriptorIndex idx = DescriptorIndex::load(a.index);
  Descriptor q = extract_descriptor(load_rgb(a.query), load_model(a.model));
  nlohmann::json res = nlohmann::json::array();
  for (const auto& n : query_nearest(q, idx, a.k)) res.push_back({{"id", n.id}, {"distance", n.distance}});
  out << res.dump(2) << "\n";
  return kExitOk;
}

inline int slic(const SlicArgs& a) {
  RgbImage img = load_rgb(a.image);
  SuperpixelMap sp = compute_slic(img, a.cfg);
  nlohmann::json j{{"width", sp.width()},
                   {"height", sp.height()},
                   {"region_size", a.cfg.region_size},
                   {"compactness", a.cfg.compactness},
                   {"iterations", a.cfg.iterations},
                   {"count", sp.count},
                   {"ids", std::vector<SuperpixelId>(sp.ids.values().begin(), sp.ids.values().end())}};
  write_json(j, a.out);
  if (!a.boundaries.empty()) {
    RgbImage overlay = img;
    for (std::size_t y = 0; y < sp.height(); ++y)
      for (std::size_t x = 0; x < sp.width(); ++x) {
        const auto id = sp.ids(x, y);
        const bool edge = (x + 1 < sp.width() && sp.ids(x + 1, y) != id) ||
                          (y + 1 < sp.height() && sp.ids(x, y + 1) != id);
        if (edge) overlay(x, y) = {255, 0, 0};
      }
    save_rgb(overlay, a.boundaries);
  }
  return kExitOk;
}

inline int smooth(const SmoothArgs& a) {
  Palette palette = load_palette(a.palette);
  save_mask(smooth_mask(load_mask(a.mask, palette.size()), a.radius), a.out, palette.size());
  return kExitOk;
}

inline int serve(const ServeArgs& a, std::ostream& out) {
  ServiceConfig cfg{a.dir, a.palette, a.ui,
                    a.missing == "background" ? MissingMaskPolicy::background
                                              : MissingMaskPolicy::not_found};
  AnnotationService svc(cfg);
  out << "serving " << a.dir << " on http://" << a.host << ":" << a.port << "\n" << std::flush;
  if (!svc.listen(a.host, a.port)) throw IoError("cannot listen on port " + std::to_string(a.port));
  return kExitOk;
}

inline int synth(const SynthArgs& a, std::ostream& out) {
  fs::create_directories(fs::path(a.out) / "images");
  fs::create_directories(fs::path(a.out) / "masks");
  fs::create_directories(fs::path(a.out) / "heatmaps");
  std::vector<synthetic::Item> items;
  Palette palette = synthetic::outfit_palette();
  if (a.kind == "outfit") {
    synthetic::OutfitConfig cfg;
    cfg.seed = a.seed;
    if (a.count) cfg.count = a.count;
    items = synthetic::outfit_dataset(cfg);
  } else if (a.kind == "stripes") {
    synthetic::StripeConfig cfg;
    cfg.seed = a.seed;
    if (a.count) cfg.count = a.count;
    items = synthetic::stripe_dataset(cfg);
    palette = synthetic::stripe_palette();
  } else {
    throw InvalidArgument("unknown dataset kind " + a.kind);
  }
  std::vector<std::string> ids;
  for (const auto& it : items) ids.push_back(it.id);
  const double train = 1.0 - a.val_ratio - a.test_ratio;
  DatasetSplits splits = split_dataset(ids, {train, a.val_ratio, a.test_ratio}, a.seed);
  auto split_of = [&](const std::string& id) {
    if (std::find(splits.val.begin(), splits.val.end(), id) != splits.val.end()) return Split::val;
    if (std::find(splits.test.begin(), splits.test.end(), id) != splits.test.end()) return Split::test;
    return Split::train;
  };
  std::vector<ManifestItem> entries;
  for (const auto& it : items) {
    save_rgb(it.image, (fs::path(a.out) / "images" / (it.id + ".png")).string());
    save_mask(it.gt, (fs::path(a.out) / "masks" / (it.id + ".png")).string(), palette.size());
    save_hmt1(it.heatmaps, (fs::path(a.out) / "heatmaps" / (it.id + ".hmt1")).string());
    entries.push_back({it.id, "images/" + it.id + ".png", "masks/" + it.id + ".png", split_of(it.id)});
  }
  save_manifest(DatasetManifest(entries), (fs::path(a.out) / "manifest.json").string());
  save_palette(palette, (fs::path(a.out) / "palette.json").string());
  out << "wrote " << items.size() << " items (" << splits.train.size() << " train, "
      << splits.val.size() << " val, " << splits.test.size() << " test) to " << a.out << "\n";
  return kExitOk;
}

}  // namespace detail

// Exit codes: 0 success, 1 runtime failure, 2 bad arguments.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"clothing parsing toolkit: gating, dense CRF refinement, evaluation, annotation"};
  app.require_subcommand(1);
  app.name("clothparse");

  const std::vector<std::string> modes{"parallel", "sequential"};

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-toy", "train the desk-scale gated model in three stages");
  c_train->add_option("--manifest", train.manifest, "dataset manifest JSON")->required();
  c_train->add_option("--palette", train.palette, "palette JSON")->required();
  c_train->add_option("--out", train.out, "output model file")->required();
  c_train->add_option("--seed", train.schedule.seed, "initialisation seed");
  c_train->add_option("--lambda", train.schedule.lambda, "weight of the presence loss")->check(CLI::NonNegativeNumber);
  c_train->add_option("--step", train.schedule.step, "gradient-descent step size")->check(CLI::PositiveNumber);
  c_train->add_option("--epochs-trunk", train.schedule.epochs_trunk, "stage A epochs");
  c_train->add_option("--epochs-encoder", train.schedule.epochs_encoder, "stage B epochs");
  c_train->add_option("--epochs-joint", train.schedule.epochs_joint, "stage C epochs");

  InferArgs infer;
  auto* c_infer = app.add_subcommand("infer-toy", "run the trained model: heatmaps and gate vector");
  c_infer->add_option("--model", infer.model, "model file")->required();
  c_infer->add_option("--image", infer.image, "RGB PNG")->required();
  c_infer->add_option("--out-heatmap", infer.out_heatmap, "output HMT1 heatmaps")->required();
  c_infer->add_option("--out-gate", infer.out_gate, "output gate vector JSON");

  GateArgs gate_args;
  auto* c_gate = app.add_subcommand("gate", "multiply each heatmap channel by its gate value");
  c_gate->add_option("--heatmap", gate_args.heatmap, "input HMT1")->required();
  c_gate->add_option("--gate", gate_args.gate, "gate vector JSON {\"gate\": [...]}")->required();
  c_gate->add_option("--out", gate_args.out, "output HMT1")->required();

  RefineArgs refine;
  auto* c_refine = app.add_subcommand("crf-refine", "dense CRF mean-field refinement");
  c_refine->add_option("--heatmap", refine.heatmap, "input HMT1 scores")->required();
  c_refine->add_option("--image", refine.image, "RGB PNG")->required();
  c_refine->add_option("--params", refine.params, "CRF parameter JSON (default 10,10,30,10,3)");
  c_refine->add_option("--iterations", refine.iterations, "mean-field sweeps");
  c_refine->add_option("--mode", refine.mode, "parallel or sequential")->check(CLI::IsMember(modes));
  c_refine->add_option("--out-heatmap", refine.out_heatmap, "output HMT1 of log Q");
  c_refine->add_option("--out-mask", refine.out_mask, "output decoded mask PNG");

  TuneArgs tune_args;
  auto* c_tune = app.add_subcommand("tune", "fit CRF parameters to validation mean IoU");
  c_tune->add_option("--manifest", tune_args.manifest, "dataset manifest JSON")->required();
  c_tune->add_option("--heatmaps", tune_args.heatmaps, "directory of <id>.hmt1")->required();
  c_tune->add_option("--palette", tune_args.palette, "palette JSON")->required();
  c_tune->add_option("--out", tune_args.out, "output CRF parameter JSON")->required();
  c_tune->add_option("--params", tune_args.params, "starting parameters (default 10,10,30,10,3)");
  c_tune->add_option("--split", tune_args.split, "split to tune on");
  c_tune->add_option("--budget", tune_args.budget, "objective evaluations")->check(CLI::PositiveNumber);
  c_tune->add_option("--iterations", tune_args.iterations, "mean-field sweeps");
  c_tune->add_option("--mode", tune_args.mode, "parallel or sequential")->check(CLI::IsMember(modes));

  EvalArgs eval_args;
  auto* c_eval = app.add_subcommand("eval", "pixel accuracy, IoU and outfit-prediction metrics");
  c_eval->add_option("--manifest", eval_args.manifest, "dataset manifest JSON")->required();
  c_eval->add_option("--predictions", eval_args.predictions, "directory of <id>.png masks")->required();
  c_eval->add_option("--palette", eval_args.palette, "palette JSON")->required();
  c_eval->add_option("--out", eval_args.out, "output report JSON");
  c_eval->add_option("--table", eval_args.table, "output text table");
  c_eval->add_option("--gates", eval_args.gates, "directory of <id>.json gate vectors");
  c_eval->add_option("--split", eval_args.split, "train, val, test or all");
  c_eval->add_option("--threshold", eval_args.threshold, "presence threshold")->check(CLI::Range(0.0, 1.0));

  IndexArgs index_args;
  auto* c_index = app.add_subcommand("build-index", "index outfit descriptors of a dataset");
  c_index->add_option("--manifest", index_args.manifest, "dataset manifest JSON")->required();
  c_index->add_option("--model", index_args.model, "model file")->required();
  c_index->add_option("--out", index_args.out, "output index file")->required();
  c_index->add_option("--split", index_args.split, "train, val, test or all");

  RetrieveArgs ret;
  auto* c_ret = app.add_subcommand("retrieve", "nearest images by outfit descriptor");
  c_ret->add_option("--query", ret.query, "query RGB PNG")->required();
  c_ret->add_option("--index", ret.index, "index file")->required();
  c_ret->add_option("--model", ret.model, "model file")->required();
  c_ret->add_option("-k", ret.k, "number of results")->check(CLI::PositiveNumber);

  SlicArgs slic_args;
  auto* c_slic = app.add_subcommand("slic", "SLIC superpixels as a JSON id map");
  c_slic->add_option("--image", slic_args.image, "RGB PNG")->required();
  c_slic->add_option("--out", slic_args.out, "output JSON")->required();
  c_slic->add_option("--boundaries", slic_args.boundaries, "output PNG with boundaries drawn");
  c_slic->add_option("--region-size", slic_args.cfg.region_size, "grid step in pixels");
  c_slic->add_option("--compactness", slic_args.cfg.compactness, "spatial weight");
  c_slic->add_option("--iterations", slic_args.cfg.iterations, "k-means iterations");

  SmoothArgs smooth_args;
  auto* c_smooth = app.add_subcommand("smooth", "morphological clean-up of a label mask");
  c_smooth->add_option("--mask", smooth_args.mask, "input mask PNG")->required();
  c_smooth->add_option("--palette", smooth_args.palette, "palette JSON")->required();
  c_smooth->add_option("--out", smooth_args.out, "output mask PNG")->required();
  c_smooth->add_option("--radius", smooth_args.radius, "disc radius")->check(CLI::NonNegativeNumber);

  ServeArgs serve_args;
  auto* c_serve = app.add_subcommand("serve", "annotation REST service");
  c_serve->add_option("--dir", serve_args.dir, "project directory")->required();
  c_serve->add_option("--palette", serve_args.palette, "palette JSON")->required();
  c_serve->add_option("--port", serve_args.port, "TCP port");
  c_serve->add_option("--host", serve_args.host, "bind address");
  c_serve->add_option("--ui", serve_args.ui, "static UI bundle directory");
  c_serve->add_option("--missing-mask", serve_args.missing, "404 or background")
      ->check(CLI::IsMember({"404", "background"}));

  SynthArgs synth_args;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic dataset (images, masks, heatmaps, manifest)");
  c_synth->add_option("--out", synth_args.out, "output directory")->required();
  c_synth->add_option("--kind", synth_args.kind, "outfit or stripes")->check(CLI::IsMember({"outfit", "stripes"}));
  c_synth->add_option("--seed", synth_args.seed, "generator and split seed");
  c_synth->add_option("--count", synth_args.count, "number of images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_train->parsed()) return train_toy(train, out);
    if (c_infer->parsed()) return infer_toy(infer);
    if (c_gate->parsed()) return gate(gate_args);
    if (c_refine->parsed()) return crf_refine(refine);
    if (c_tune->parsed()) return tune(tune_args, out);
    if (c_eval->parsed()) return eval(eval_args, out);
    if (c_index->parsed()) return build_index(index_args, out);
    if (c_ret->parsed()) return retrieve(ret, out);
    if (c_slic->parsed()) return slic(slic_args);
    if (c_smooth->parsed()) return smooth(smooth_args);
    if (c_serve->parsed()) return serve(serve_args, out);
    if (c_synth->parsed()) return synth(synth_args, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace clothparse::cli
