#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "clothparse/cli/cli.hpp"
#include "support.hpp"

using namespace clothparse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "clothparse");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = clothparse::cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const std::string& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

constexpr double kFrozenMeanIou = 0.39601379872489145;
constexpr double kFrozenAccuracy = 0.79839409722222221;

int spawn(const std::string& args) {
  int status = std::system((std::string(CLOTHPARSE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliExitCodes, FromBinary) {
  EXPECT_EQ(spawn("--help"), 0);
  EXPECT_EQ(spawn("slic --help"), 0);
  EXPECT_EQ(spawn("eval --help"), 0);
  EXPECT_EQ(spawn("eval --manifest m --predictions p --palette x --no-such-flag"), 2);
  EXPECT_EQ(spawn("nosuch"), 2);
  EXPECT_EQ(spawn("slic --image"), 2);
  EXPECT_EQ(spawn("crf-refine --heatmap a.hmt1 --image b.png --mode fastest"), 2);
  EXPECT_EQ(spawn("slic --image /nonexistent.png --out /tmp/x.json"), 1);
}

TEST(CliExitCodes, InProcess) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, 2);
  auto r = run_cli({"gate", "--heatmap", "/nonexistent.hmt1", "--gate", "/nonexistent.json", "--out", "/tmp/o"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(run_cli({"eval", "--manifest", "m", "--predictions", "p", "--palette", "x", "--threshold", "2"}).code, 2);
}

TEST(Cli, GateAndRefine) {
  testsupport::TempDir t("cli-gate");
  auto fx = testsupport::data_dir() / "fixtures";
  std::mt19937_64 rng(101);
  HeatmapStack h = testsupport::random_heatmaps(rng, 3, 6, 5, 2.0);
  RgbImage img = testsupport::random_image(rng, 5, 6);
  save_hmt1(h, t / "h.hmt1");
  save_rgb(img, t / "img.png");
  std::ofstream(t / "g.json") << R"({"gate": [1.0, 0.5, 0.0]})";
  ASSERT_EQ(run_cli({"gate", "--heatmap", t / "h.hmt1", "--gate", t / "g.json", "--out", t / "gated.hmt1"}).code, 0);
  HeatmapStack gated = load_hmt1(t / "gated.hmt1");
  for (std::size_t p = 0; p < 30; ++p) {
    EXPECT_EQ(gated.at(0, p), h.at(0, p));
    EXPECT_EQ(gated.at(1, p), h.at(1, p) * 0.5f);
    EXPECT_EQ(gated.at(2, p), 0.0f);
  }

  std::ofstream(t / "bad.json") << R"({"gate": [1.0, 0.5]})";
  EXPECT_EQ(run_cli({"gate", "--heatmap", t / "h.hmt1", "--gate", t / "bad.json", "--out", t / "x.hmt1"}).code, 1);

  ASSERT_EQ(run_cli({"crf-refine", "--heatmap", t / "gated.hmt1", "--image", t / "img.png", "--iterations", "5",
                 "--out-heatmap", t / "logq.hmt1", "--out-mask", t / "mask.png"})
                .code,
            0);
  ProbMaps q = mean_field_infer(CrfInstance(softmax_probmaps(gated), img, CrfParams{}), 5,
                                MeanFieldMode::parallel);
  HeatmapStack logq = load_hmt1(t / "logq.hmt1");
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_EQ(logq.values()[i], float(std::log(std::max(q.values()[i], 1e-30))));
  EXPECT_EQ(load_mask(t / "mask.png", 3), decode_map(q));
}

TEST(Cli, SlicJson) {
  testsupport::TempDir t("cli-slic");
  auto fx = read_json((testsupport::data_dir() / "fixtures" / "slic_twotone_48x40_s8.json").string());
  RgbImage img(fx["width"], fx["height"]);
  auto rgb = fx["rgb"].get<std::vector<int>>();
  for (std::size_t p = 0; p < img.size(); ++p)
    img[p] = {std::uint8_t(rgb[3 * p]), std::uint8_t(rgb[3 * p + 1]), std::uint8_t(rgb[3 * p + 2])};
  save_rgb(img, t / "img.png");
  ASSERT_EQ(run_cli({"slic", "--image", t / "img.png", "--out", t / "sp.json", "--region-size",
                 std::to_string(int(fx["region_size"])), "--compactness",
                 std::to_string(double(fx["compactness"])), "--iterations",
                 std::to_string(int(fx["iterations"])), "--boundaries", t / "b.png"})
                .code,
            0);
  auto j = read_json(t / "sp.json");
  EXPECT_EQ(j["count"], fx["count"]);
  EXPECT_EQ(j["ids"], fx["ids"]);
  EXPECT_EQ(png_dimensions(t / "b.png"), (std::pair<std::size_t, std::size_t>{48, 40}));
}

TEST(Cli, Smooth) {
  testsupport::TempDir t("cli-smooth");
  LabelMask m(5, 5, 0);
  for (std::size_t y = 1; y < 4; ++y)
    for (std::size_t x = 1; x < 4; ++x) m(x, y) = 2;
  m(0, 4) = 3;
  save_mask(m, t / "m.png", 5);
  auto pal = (testsupport::data_dir() / "sample" / "palette.json").string();
  ASSERT_EQ(run_cli({"smooth", "--mask", t / "m.png", "--palette", pal, "--out", t / "s.png"}).code, 0);
  EXPECT_EQ(load_mask(t / "s.png", 5), smooth_mask(m, 1));
  // A label outside the palette is a runtime error.
  LabelMask bad(2, 2, 9);
  save_mask(bad, t / "bad.png", 10);
  EXPECT_EQ(run_cli({"smooth", "--mask", t / "bad.png", "--palette", pal, "--out", t / "x.png"}).code, 1);
}

TEST(Cli, IndexAndRetrieve) {
  testsupport::TempDir t("cli-index");
  auto fx = testsupport::data_dir() / "fixtures";
  ASSERT_EQ(run_cli({"synth", "--out", t / "ds", "--count", "6"}).code, 0);
  ASSERT_EQ(run_cli({"build-index", "--manifest", t / "ds/manifest.json", "--model",
                 (fx / "retrieval_model.hmtm").string(), "--out", t / "idx.hmt1"})
                .code,
            0);
  auto r = run_cli({"retrieve", "--query", t / "ds/images/outfit_003.png", "--index", t / "idx.hmt1", "--model",
                (fx / "retrieval_model.hmtm").string(), "-k", "3"});
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["id"], "outfit_003");
  EXPECT_EQ(j[0]["distance"], 0.0);
  EXPECT_LE(j[1]["distance"].get<double>(), j[2]["distance"].get<double>());
}

TEST(Cli, TuneWritesParameters) {
  testsupport::TempDir t("cli-tune");
  ASSERT_EQ(run_cli({"synth", "--kind", "stripes", "--out", t / "ds", "--count", "5"}).code, 0);
  auto r = run_cli({"tune", "--manifest", t / "ds/manifest.json", "--heatmaps", t / "ds/heatmaps", "--palette",
                t / "ds/palette.json", "--out", t / "crf.json", "--split", "all", "--budget", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("after 8 evaluations"), std::string::npos) << r.out;
  auto j = read_json(t / "crf.json");
  for (const char* k : {"w1", "w2", "sigma_position", "sigma_color", "sigma_smooth"}) {
    ASSERT_TRUE(j.contains(k)) << k;
    EXPECT_GT(j[k].get<double>(), 0.0);
  }
  CrfParams p = load_crf_params(t / "crf.json");
  EXPECT_NO_THROW(p.validate());
}

// The file-based pipeline must reproduce the in-memory computation exactly.
TEST(Cli, PipelineMatchesLibrary) {
  testsupport::TempDir t("cli-pipeline");
  auto ds = t / "ds";
  ASSERT_EQ(run_cli({"synth", "--out", ds, "--count", "15"}).code, 0);
  auto manifest = ds + "/manifest.json", palette = ds + "/palette.json";
  auto train = run_cli({"train-toy", "--manifest", manifest, "--palette", palette, "--out", t / "model.hmtm",
                    "--epochs-trunk", "20", "--epochs-encoder", "20", "--epochs-joint", "10"});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_NE(train.out.find("stage C (joint)"), std::string::npos);

  fs::create_directories(t / "pred");
  fs::create_directories(t / "gates");
  DatasetManifest m = load_manifest(manifest);
  ToyModelParams model = load_model(t / "model.hmtm");
  std::vector<LabelMask> preds, gts;
  for (const auto& it : m.subset(Split::test)) {
    auto gate = t / ("gates/" + it.id + ".json");
    auto gated = t / (it.id + "_gated.hmt1");
    ASSERT_EQ(run_cli({"infer-toy", "--model", t / "model.hmtm", "--image", it.image, "--out-heatmap",
                   t / (it.id + "_trunk.hmt1"), "--out-gate", gate})
                  .code,
              0);
    ASSERT_EQ(run_cli({"gate", "--heatmap", ds + "/heatmaps/" + it.id + ".hmt1", "--gate", gate, "--out", gated})
                  .code,
              0);
    ASSERT_EQ(run_cli({"crf-refine", "--heatmap", gated, "--image", it.image, "--out-mask",
                   t / ("pred/" + it.id + ".png")})
                  .code,
              0);

    RgbImage img = load_rgb(it.image);
    GateVector g = encoder_forward(extract_features(img), model).gate;
    HeatmapStack h = gate_heatmaps(load_hmt1(ds + "/heatmaps/" + it.id + ".hmt1"), g);
    preds.push_back(decode_map(mean_field_infer(CrfInstance(softmax_probmaps(h), img, CrfParams{}), 10,
                                                MeanFieldMode::parallel)));
    gts.push_back(load_mask(it.mask, 5));
    EXPECT_EQ(load_mask(t / ("pred/" + it.id + ".png"), 5), preds.back());
  }
  ASSERT_FALSE(preds.empty());
  auto ev = run_cli({"eval", "--manifest", manifest, "--predictions", t / "pred", "--palette", palette, "--gates",
                 t / "gates", "--out", t / "report.json", "--table", t / "table.txt"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  auto report = read_json(t / "report.json");
  EXPECT_EQ(report["split"], "test");
  EXPECT_EQ(report["images"], preds.size());
  EXPECT_DOUBLE_EQ(report["segmentation"]["mean_iou"].get<double>(), iou_report(preds, gts, 5).mean_iou);
  EXPECT_DOUBLE_EQ(report["segmentation"]["pixel_accuracy"].get<double>(), pixel_accuracy(preds, gts));
  EXPECT_TRUE(report["outfit"].contains("f1"));
  std::ifstream tf(t / "table.txt");
  std::string table((std::istreambuf_iterator<char>(tf)), std::istreambuf_iterator<char>());
  EXPECT_EQ(table, ev.out);
  EXPECT_NE(table.find("IoU"), std::string::npos);
}

// Default dataset, default training schedule, default CRF: frozen from the
// reference run of the same pipeline.
TEST(Cli, DefaultPipelineRegression) {
  testsupport::TempDir t("cli-default");
  auto ds = t / "ds";
  ASSERT_EQ(run_cli({"synth", "--out", ds}).code, 0);
  auto manifest = ds + "/manifest.json", palette = ds + "/palette.json";
  ASSERT_EQ(run_cli({"train-toy", "--manifest", manifest, "--palette", palette, "--out", t / "model.hmtm"}).code, 0);
  fs::create_directories(t / "pred");
  fs::create_directories(t / "gates");
  for (const auto& it : load_manifest(manifest).subset(Split::test)) {
    auto gate = t / ("gates/" + it.id + ".json");
    auto gated = t / (it.id + "_gated.hmt1");
    ASSERT_EQ(run_cli({"infer-toy", "--model", t / "model.hmtm", "--image", it.image, "--out-heatmap",
                       t / (it.id + "_trunk.hmt1"), "--out-gate", gate})
                  .code,
              0);
    ASSERT_EQ(run_cli({"gate", "--heatmap", ds + "/heatmaps/" + it.id + ".hmt1", "--gate", gate, "--out", gated}).code,
              0);
    ASSERT_EQ(run_cli({"crf-refine", "--heatmap", gated, "--image", it.image, "--out-mask",
                       t / ("pred/" + it.id + ".png")})
                  .code,
              0);
  }
  ASSERT_EQ(run_cli({"eval", "--manifest", manifest, "--predictions", t / "pred", "--palette", palette,
                     "--gates", t / "gates", "--out", t / "report.json"})
                .code,
            0);
  auto report = read_json(t / "report.json");
  EXPECT_EQ(report["images"], 12);
  EXPECT_NEAR(report["segmentation"]["mean_iou"].get<double>(), kFrozenMeanIou, 1e-6);
  EXPECT_NEAR(report["segmentation"]["pixel_accuracy"].get<double>(), kFrozenAccuracy, 1e-6);
}
