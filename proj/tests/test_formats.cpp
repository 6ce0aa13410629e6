#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace clothparse;
using testsupport::TempDir;

namespace {

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string palette_json(const std::vector<std::pair<int, std::string>>& entries) {
  nlohmann::json labels = nlohmann::json::array();
  for (auto& [i, n] : entries) labels.push_back({{"index", i}, {"name", n}, {"color", {i, i, i}}});
  return nlohmann::json{{"labels", labels}}.dump();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Palette, TwoEntryFile) {
  TempDir t("pal");
  write_text(t / "p.json", palette_json({{0, "background"}, {1, "dress"}}));
  Palette p = load_palette(t / "p.json");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].name, "dress");
  EXPECT_EQ(p[1].color[0], 1);
}

TEST(Palette, GappedIndicesRejected) {
  TempDir t("pal");
  write_text(t / "p.json", palette_json({{0, "background"}, {2, "dress"}}));
  std::string msg = error_of([&] { load_palette(t / "p.json"); });
  EXPECT_NE(msg.find("gapped indices"), std::string::npos) << msg;
}

TEST(Palette, OtherInvariantViolations) {
  EXPECT_NE(error_of([] { Palette::from_json(nlohmann::json::parse(palette_json({{0, "background"}, {1, "a"}, {1, "b"}}))); })
                .find("duplicate index"),
            std::string::npos);
  EXPECT_NE(error_of([] { Palette::from_json(nlohmann::json::parse(palette_json({{0, "sky"}, {1, "a"}}))); })
                .find("background"),
            std::string::npos);
  EXPECT_NE(error_of([] { Palette::from_json(nlohmann::json::parse(palette_json({{0, "background"}, {1, "a"}, {2, "a"}}))); })
                .find("duplicate name"),
            std::string::npos);
  EXPECT_THROW(Palette::from_json(nlohmann::json::parse(R"({"labels": []})")), FormatError);
  EXPECT_THROW(Palette::from_json(nlohmann::json::parse(R"([1,2])")), FormatError);
  EXPECT_THROW(Palette::from_json(nlohmann::json::parse(
                   R"({"labels":[{"index":0,"name":"background","color":[0,0,300]}]})")),
               FormatError);
  TempDir t("pal");
  write_text(t / "bad.json", "{not json");
  EXPECT_THROW(load_palette(t / "bad.json"), FormatError);
  EXPECT_THROW(load_palette(t / "missing.json"), IoError);
}

TEST(Palette, UnorderedEntriesAreSortedByIndex) {
  Palette p = Palette::from_json(nlohmann::json::parse(palette_json({{1, "dress"}, {0, "background"}})));
  EXPECT_EQ(p[0].name, "background");
  EXPECT_EQ(p[1].name, "dress");
}

TEST(Palette, BundledPaletteHas25Labels) {
  Palette p = load_palette((testsupport::data_dir() / "palette.json").string());
  EXPECT_EQ(p.size(), 25u);
  EXPECT_EQ(p[0].name, "background");
}

TEST(Palette, SaveLoadRoundTrip) {
  TempDir t("pal");
  Palette p = load_palette((testsupport::data_dir() / "palette.json").string());
  save_palette(p, t / "p.json");
  EXPECT_EQ(load_palette(t / "p.json"), p);
}

TEST(MaskIo, RandomMaskRoundTrip) {
  TempDir t("mask");
  std::mt19937_64 rng(1);
  LabelMask m = testsupport::random_mask(rng, 16, 16, 5);
  save_mask(m, t / "m.png", 5);
  EXPECT_EQ(load_mask(t / "m.png", 5), m);
  EXPECT_EQ(decode_mask_png(encode_mask_png(m), 5), m);
}

TEST(MaskIo, NonSquareRoundTrip) {
  std::mt19937_64 rng(2);
  LabelMask m = testsupport::random_mask(rng, 7, 3, 256);
  EXPECT_EQ(decode_mask_png(encode_mask_png(m), 256), m);
}

TEST(MaskIo, AllZeroLoadsAsBackground) {
  TempDir t("mask");
  save_mask(LabelMask(9, 4), t / "z.png", 5);
  LabelMask m = load_mask(t / "z.png", 5);
  EXPECT_EQ(m.width(), 9u);
  EXPECT_EQ(m.height(), 4u);
  for (Label v : m.values()) EXPECT_EQ(v, 0);
}

TEST(MaskIo, ValueOutsidePaletteRejected) {
  LabelMask m(4, 4);
  m(2, 1) = 7;
  auto png = encode_mask_png(m);
  EXPECT_THROW(decode_mask_png(png, 5), FormatError);
  EXPECT_NO_THROW(decode_mask_png(png, 8));
  TempDir t("mask");
  EXPECT_THROW(save_mask(m, t / "m.png", 5), std::exception);
}

TEST(MaskIo, RgbPngIsNotAMask) {
  RgbImage img(4, 4, Rgb{1, 2, 3});
  EXPECT_THROW(decode_mask_png(encode_rgb_png(img), 5), FormatError);
}

TEST(MaskIo, GarbageAndMissingFiles) {
  std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_THROW(decode_mask_png(junk, 5), FormatError);
  EXPECT_THROW(load_mask("/nonexistent/m.png", 5), std::exception);
}

TEST(RgbIo, RoundTrip) {
  std::mt19937_64 rng(3);
  RgbImage img = testsupport::random_image(rng, 13, 5);
  EXPECT_EQ(decode_rgb_png(encode_rgb_png(img)), img);
  TempDir t("rgb");
  save_rgb(img, t / "i.png");
  EXPECT_EQ(load_rgb(t / "i.png"), img);
  EXPECT_EQ(png_dimensions(t / "i.png"), std::make_pair(std::size_t(13), std::size_t(5)));
}

TEST(Hmt1, ZeroStackRoundTrip) {
  HeatmapStack h(3, 2, 2);
  EXPECT_EQ(decode_hmt1(encode_hmt1(h)), h);
}

TEST(Hmt1, ByteLayout) {
  HeatmapStack h(2, 1, 3);
  for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] = float(i) * 1.5f - 2.0f;
  std::string b = encode_hmt1(h);
  ASSERT_EQ(b.size(), 16u + 6u * 4u);
  EXPECT_EQ(b.substr(0, 4), "HMT1");
  const unsigned char* u = reinterpret_cast<const unsigned char*>(b.data());
  EXPECT_EQ(u[4], 2);
  EXPECT_EQ(u[8], 1);
  EXPECT_EQ(u[12], 3);
  for (int k = 5; k < 8; ++k) EXPECT_EQ(u[k], 0);
  // value 1 is -0.5f = 0xBF000000, little endian
  EXPECT_EQ(u[20], 0x00);
  EXPECT_EQ(u[23], 0xBF);
}

TEST(Hmt1, ExactBinaryRoundTrip) {
  HeatmapStack h(2, 3, 4);
  const float specials[] = {1.5f, -0.25f, 1e-38f, -3.4e38f, 0.1f, -0.0f, 1e-45f};
  for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] = specials[i % 7] * float(i + 1);
  TempDir t("hmt");
  save_hmt1(h, t / "h.hmt1");
  HeatmapStack r = load_hmt1(t / "h.hmt1");
  ASSERT_TRUE(r.same_shape(h));
  EXPECT_EQ(std::memcmp(r.values().data(), h.values().data(), h.size() * sizeof(float)), 0);
}

TEST(Hmt1, BadMagic) {
  std::string b = encode_hmt1(HeatmapStack(1, 1, 1));
  b.replace(0, 4, "XXXX");
  std::string msg = error_of([&] { decode_hmt1(b); });
  EXPECT_NE(msg.find("bad magic"), std::string::npos) << msg;
}

TEST(Hmt1, Truncation) {
  std::string b = encode_hmt1(HeatmapStack(2, 2, 2, 1.0f));
  EXPECT_NE(error_of([&] { decode_hmt1(b.substr(0, 10)); }).find("truncated header"), std::string::npos);
  EXPECT_NE(error_of([&] { decode_hmt1(b.substr(0, b.size() - 1)); }).find("truncated payload"),
            std::string::npos);
  EXPECT_THROW(decode_hmt1(b + "x"), FormatError);
}

TEST(Hmt1, DimsOverflow) {
  std::ostringstream os;
  os.write("HMT1", 4);
  for (std::uint32_t v : {2000u, 2000u, 2000u}) hmt1_detail::put_u32(os, v);
  std::string msg = error_of([&] { decode_hmt1(os.str()); });
  EXPECT_NE(msg.find("dims overflow"), std::string::npos) << msg;
}

TEST(Hmt1, ConcatenatedBlocksReadSequentially) {
  HeatmapStack a(1, 2, 2, 3.0f), b(2, 1, 1, -1.0f);
  std::stringstream ss;
  write_hmt1(ss, a);
  write_hmt1(ss, b);
  EXPECT_EQ(read_hmt1(ss), a);
  EXPECT_EQ(read_hmt1(ss), b);
}

TEST(Softmax, AnalyticExamples) {
  Tensor3<double> s(2, 1, 3);
  s(0, 0, 0) = 0, s(1, 0, 0) = 0;
  s(0, 0, 1) = std::log(2.0), s(1, 0, 1) = 0;
  s(0, 0, 2) = 1000, s(1, 0, 2) = 0;
  ProbMaps p = softmax_probmaps(s);
  EXPECT_DOUBLE_EQ(p(0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(1, 0, 0), 0.5);
  EXPECT_NEAR(p(0, 0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p(1, 0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(p(0, 0, 2), 1.0);
  EXPECT_EQ(p(1, 0, 2), 0.0);
}

TEST(Softmax, NanRejected) {
  HeatmapStack h(2, 1, 1);
  h.values()[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(softmax_probmaps(h), InvalidArgument);
  h.values()[1] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(softmax_probmaps(h), InvalidArgument);
}

TEST(Softmax, RowsNormalisedAndShiftInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> shift(-500, 500);
  for (int t = 0; t < 50; ++t) {
    std::size_t labels = 1 + rng() % 6, h = 1 + rng() % 5, w = 1 + rng() % 5;
    Tensor3<double> s = testsupport::random_heatmaps(rng, labels, h, w, 20.0).cast<double>();
    Tensor3<double> shifted = s;
    for (std::size_t p = 0; p < s.pixels(); ++p) {
      double c = shift(rng);
      for (std::size_t l = 0; l < labels; ++l) shifted.at(l, p) += c;
    }
    ProbMaps a = softmax_probmaps(s), b = softmax_probmaps(shifted);
    for (std::size_t p = 0; p < s.pixels(); ++p) {
      double sum = 0;
      for (std::size_t l = 0; l < labels; ++l) {
        sum += a.at(l, p);
        EXPECT_GE(a.at(l, p), 0.0);
        EXPECT_LE(a.at(l, p), 1.0);
        EXPECT_NEAR(a.at(l, p), b.at(l, p), 1e-9);
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

TEST(Presence, Examples) {
  LabelMask m(2, 2, std::vector<Label>{0, 3, 3, 7});
  PresenceVector v = presence_vector(m, 8);
  ASSERT_EQ(v.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(v.present(i), i == 0 || i == 3 || i == 7) << i;
  PresenceVector bg = presence_vector(LabelMask(3, 3), 4);
  EXPECT_EQ(bg.values, (std::vector<double>{1, 0, 0, 0}));
  EXPECT_THROW(presence_vector(m, 5), InvalidArgument);
}

TEST(Presence, BundledMaskMatchesHistogram) {
  LabelMask m = load_mask((testsupport::data_dir() / "fixtures" / "sample_mask.png").string(), 25);
  std::vector<std::size_t> hist(25, 0);
  for (std::size_t y = 0; y < m.height(); ++y)
    for (std::size_t x = 0; x < m.width(); ++x) ++hist[m(x, y)];
  PresenceVector v = presence_vector(m, 25);
  std::size_t present = 0;
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_EQ(v[i], hist[i] > 0 ? 1.0 : 0.0) << i;
    present += hist[i] > 0;
  }
  EXPECT_GE(present, 3u);
}

TEST(Presence, RandomMasksMatchHistogram) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::size_t labels = 1 + rng() % 20;
    LabelMask m = testsupport::random_mask(rng, 1 + rng() % 6, 1 + rng() % 6, labels);
    std::set<int> seen(m.values().begin(), m.values().end());
    PresenceVector v = presence_vector(m, labels);
    for (std::size_t i = 0; i < labels; ++i) EXPECT_EQ(v[i] == 1.0, seen.count(int(i)) == 1);
  }
}

std::vector<std::string> make_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("img" + std::to_string(i));
  return ids;
}

TEST(Split, CfpdSizes) {
  auto s = split_dataset(make_ids(2682), {0.78, 0.02, 0.20}, 0);
  EXPECT_EQ(s.test.size(), 536u);
  EXPECT_EQ(s.val.size(), 53u);
  EXPECT_EQ(s.train.size(), 2093u);
}

TEST(Split, TenItems) {
  auto s = split_dataset(make_ids(10), {0.8, 0.1, 0.1}, 42);
  EXPECT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.val.size(), 1u);
  EXPECT_EQ(s.train.size(), 8u);
}

TEST(Split, DeterministicPerSeed) {
  auto a = split_dataset(make_ids(100), {}, 9), b = split_dataset(make_ids(100), {}, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  auto c = split_dataset(make_ids(100), {}, 10);
  EXPECT_NE(a.test, c.test);
}

TEST(Split, ExactDisjointPartition) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 3 + rng() % 300;
    double te = std::uniform_real_distribution<double>(0, 0.5)(rng);
    double va = std::uniform_real_distribution<double>(0, 0.3)(rng);
    auto ids = make_ids(n);
    auto s = split_dataset(ids, {1.0 - te - va, va, te}, rng());
    EXPECT_EQ(s.test.size(), std::size_t(std::floor(n * te + 1e-9)));
    EXPECT_EQ(s.val.size(), std::size_t(std::floor(n * va + 1e-9)));
    std::multiset<std::string> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all, std::multiset<std::string>(ids.begin(), ids.end()));
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split_dataset(make_ids(2), {}, 0), InvalidArgument);
  EXPECT_THROW(split_dataset(make_ids(10), {0.5, 0.2, 0.2}, 0), InvalidArgument);
  EXPECT_THROW(split_dataset(make_ids(10), {1.2, -0.1, -0.1}, 0), InvalidArgument);
}

TEST(Manifest, LoadResolvesRelativePathsAndSubsets) {
  TempDir t("man");
  std::filesystem::create_directories(t.path() / "img");
  save_rgb(RgbImage(2, 2), t / "img/a.png");
  save_mask(LabelMask(2, 2), t / "img/a_m.png");
  save_rgb(RgbImage(2, 2), t / "img/b.png");
  save_mask(LabelMask(2, 2), t / "img/b_m.png");
  write_text(t / "m.json", R"([{"id":"a","image":"img/a.png","mask":"img/a_m.png","split":"train"},
                                {"id":"b","image":"img/b.png","mask":"img/b_m.png","split":"test"}])");
  DatasetManifest m = load_manifest(t / "m.json");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(m.find("a").image));
  EXPECT_EQ(m.subset(Split::test).size(), 1u);
  EXPECT_EQ(m.subset(Split::test)[0].id, "b");
  EXPECT_TRUE(m.subset(Split::val).empty());

  save_manifest(m, t / "copy.json");
  EXPECT_EQ(load_manifest(t / "copy.json").items().size(), 2u);
}

TEST(Manifest, Errors) {
  TempDir t("man");
  save_rgb(RgbImage(2, 2), t / "a.png");
  write_text(t / "dup.json", R"([{"id":"a","image":"a.png","mask":"a.png","split":"train"},
                                  {"id":"a","image":"a.png","mask":"a.png","split":"val"}])");
  EXPECT_THROW(load_manifest(t / "dup.json"), std::exception);
  write_text(t / "missing.json", R"([{"id":"a","image":"nope.png","mask":"a.png","split":"train"}])");
  EXPECT_THROW(load_manifest(t / "missing.json"), IoError);
  write_text(t / "split.json", R"([{"id":"a","image":"a.png","mask":"a.png","split":"holdout"}])");
  EXPECT_THROW(load_manifest(t / "split.json"), std::exception);
}

TEST(Rng, DeterministicStreams) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.below(17), b.below(17));
    EXPECT_EQ(a.normal(), b.normal());
  }
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    auto v = c.below(6);
    EXPECT_LT(v, 6u);
    double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
