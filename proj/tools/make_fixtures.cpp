// Regenerates the files under data/fixtures and data/sample.
//   make_fixtures <data-dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "clothparse/clothparse.hpp"

namespace fs = std::filesystem;
using namespace clothparse;

static void write_slic_fixture(const std::string& name, const RgbImage& img, const SlicConfig& cfg,
                               const fs::path& path) {
  SuperpixelMap sp = compute_slic(img, cfg);
  std::vector<int> rgb;
  for (const Rgb& px : img.values()) {
    rgb.push_back(px.r);
    rgb.push_back(px.g);
    rgb.push_back(px.b);
  }
  nlohmann::json j{{"name", name},
                   {"width", img.width()},
                   {"height", img.height()},
                   {"region_size", cfg.region_size},
                   {"compactness", cfg.compactness},
                   {"iterations", cfg.iterations},
                   {"min_region_fraction", cfg.min_region_fraction},
                   {"rgb", rgb},
                   {"count", sp.count},
                   {"ids", std::vector<SuperpixelId>(sp.ids.values().begin(), sp.ids.values().end())}};
  std::ofstream(path) << j.dump() << "\n";
}

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <data-dir>\n";
    return 2;
  }
  const fs::path data = argv[1];
  fs::create_directories(data / "fixtures");
  fs::create_directories(data / "sample");

  RgbImage uniform(64, 64, Rgb{128, 128, 128});
  write_slic_fixture("uniform-64x64-S16", uniform, SlicConfig{}, data / "fixtures" / "slic_uniform_64x64_s16.json");

  RgbImage two(48, 40);
  for (std::size_t y = 0; y < two.height(); ++y)
    for (std::size_t x = 0; x < two.width(); ++x) {
      const long dx = long(x) - 30, dy = long(y) - 22;
      if (dx * dx + dy * dy < 81) {
        two(x, y) = {220, 40, 40};
      } else if (x < 17) {
        two(x, y) = {30, 60, 200};
      } else {
        two(x, y) = {240, 240, 230};
      }
    }
  SlicConfig small;
  small.region_size = 8;
  write_slic_fixture("twotone-48x40-S8", two, small, data / "fixtures" / "slic_twotone_48x40_s8.json");

  auto items = synthetic::outfit_dataset({});
  for (std::size_t i = 0; i < 3; ++i) {
    save_rgb(items[i].image, (data / "sample" / (items[i].id + ".png")).string());
  }
  save_mask(items[0].gt, (data / "sample" / (items[0].id + "_mask.png")).string(), 5);
  save_palette(synthetic::outfit_palette(), (data / "sample" / "palette.json").string());

  ToyModelParams model = init_model(5, kFeatureDim, 1);
  save_model(model, (data / "fixtures" / "retrieval_model.hmtm").string());
  save_rgb(items[0].image, (data / "fixtures" / "retrieval_query.png").string());
  Descriptor d = extract_descriptor(items[0].image, model);
  HeatmapStack golden(1, 1, d.size());
  std::copy(d.begin(), d.end(), golden.values().begin());
  save_hmt1(golden, (data / "fixtures" / "retrieval_descriptor.hmt1").string());

  save_mask(items[1].gt, (data / "fixtures" / "sample_mask.png").string(), 5);
  save_hmt1(items[1].heatmaps, (data / "fixtures" / "sample_heatmaps.hmt1").string());
  std::cout << "fixtures written to " << data << "\n";
  return 0;
}
