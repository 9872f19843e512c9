#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <png.h>

#include "fdim/experiment.hpp"
#include "fdim/io.hpp"
#include "fdim/presets.hpp"

using namespace fdi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "schema_version": 1, "name": "tiny", "wavenumber": 2.0,
    "obstacles": [{"kind": "five_leaf", "center": [0, 0], "rotation": 0}],
    "boundary_nodes": 64,
    "point_scatterers": {"nonlinearity": "linear", "placement": "fixed",
                         "positions": [[4, 0], [0, -4.5]], "coefficients": {"sigma": 0.5}},
    "directions": 8, "image": {"half_width": 3, "samples": 16, "harmonics": [1]}
  })");
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fdim_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ImageGrid ramp(int n) {
  ImageGrid img{{1.0, n}, 1.0, 1, cmat(n, n)};
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) img.values(ix, iy) = cplx(ix + 10.0 * iy, 0.0);
  return img;
}

std::vector<std::uint8_t> decode_png(const std::string& bytes, int& w, int& h) {
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  EXPECT_TRUE(png_image_begin_read_from_memory(&im, bytes.data(), bytes.size()));
  im.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(im));
  EXPECT_TRUE(png_image_finish_read(&im, nullptr, px.data(), 0, nullptr));
  w = int(im.width);
  h = int(im.height);
  return px;
}

}  // namespace

TEST(Config, AllPresetsParse) {
  for (const auto& name : preset_names()) {
    const auto cfg = parse_config(preset_json(name));
    EXPECT_EQ(cfg.name, name);
    EXPECT_NO_THROW(cfg.scene().validate()) << name;
  }
}

TEST(Config, PresetFilesMatchBuiltins) {
  for (const auto& name : preset_names()) {
    std::ifstream in(fs::path(FDIM_SOURCE_DIR) / "presets" / (name + ".json"));
    ASSERT_TRUE(in) << name;
    EXPECT_EQ(json::parse(in), preset_json(name)) << name;
  }
}

TEST(Config, MinimalScene) {
  const auto cfg = parse_config(minimal());
  EXPECT_EQ(cfg.kappa, 2.0);
  EXPECT_EQ(cfg.scatterer_positions().size(), 2u);
  EXPECT_EQ(cfg.boundary().size(), 64);
}

TEST(Config, FieldLevelErrors) {
  struct Case {
    const char* pointer;
    json value;
    const char* field;
  };
  const Case cases[] = {
      {"/schema_version", 2, "schema_version"},
      {"/wavenumber", -1.0, "wavenumber"},
      {"/boundary_nodes", 15, "boundary_nodes"},
      {"/quadrature_order", 6, "quadrature_order"},
      {"/directions", 0, "directions"},
      {"/image/samples", 7, "image.samples"},
      {"/image/samples", 4, "image.samples"},
      {"/image/harmonics", json::array({1, 2}), "image.harmonics"},
      {"/point_scatterers/placement", "spiral", "point_scatterers.placement"},
      {"/point_scatterers/coefficients/sigma", -0.5, "point_scatterers.coefficients.sigma"},
      {"/point_scatterers/positions/0", json::array({0.1, 0.0}), "point_scatterers"},
      {"/modality", "gfl_minus_fl", "modality"},
      {"/obstacles/0/kind", "triangle", "obstacles[0]"},
  };
  for (const auto& c : cases) {
    json j = minimal();
    j[json::json_pointer(c.pointer)] = c.value;
    const std::string msg = config_error(j);
    EXPECT_EQ(msg.rfind(c.field, 0), 0u) << c.pointer << " -> '" << msg << "'";
  }
}

TEST(Config, EmptySceneRejected) {
  json j = minimal();
  j.erase("obstacles");
  j.erase("point_scatterers");
  EXPECT_EQ(config_error(j).rfind("scene", 0), 0u);
}

TEST(Config, NonlinearCoefficientCounts) {
  json j = minimal();
  j["point_scatterers"]["nonlinearity"] = "cubic";
  j["point_scatterers"]["coefficients"] = {{"linear", {0.5, 0.5}}, {"nonlinear", {0.1, 0.1}}};
  EXPECT_EQ(config_error(j).rfind("point_scatterers.coefficients.nonlinear", 0), 0u);
  j["point_scatterers"]["coefficients"]["nonlinear"] = {0.1, 0.1, 0.2};
  const auto cfg = parse_config(j);
  EXPECT_EQ(cfg.coefficients.nl3, 0.2);
}

TEST(Config, AnnulusPlacementSeeded) {
  json j = minimal();
  j["point_scatterers"]["placement"] = "annulus";
  j["point_scatterers"]["annulus"] = {{"count", 200}, {"inner", 10.0}, {"outer", 11.0}};
  j["seed"] = 42;
  const auto a = parse_config(j).scatterer_positions();
  const auto b = parse_config(j).scatterer_positions();
  ASSERT_EQ(a.size(), 200u);
  EXPECT_EQ(a, b);
  for (const Vec2& p : a) {
    EXPECT_GE(norm(p), 10.0);
    EXPECT_LE(norm(p), 11.0);
  }
  j["seed"] = 43;
  EXPECT_NE(parse_config(j).scatterer_positions(), a);
}

TEST(Config, LoadReportsMissingFile) {
  EXPECT_ANY_THROW(load_config("/nonexistent/config.json"));
}

TEST(Ssrm, RoundTrip) {
  const fs::path dir = temp_dir("ssrm");
  cmat P(3, 2);
  P << cplx(1, 2), cplx(-3.5, 0), cplx(0, 1e-300), cplx(7, -8), cplx(0.1, 0.2), cplx(9, 9);
  write_ssrm((dir / "p.ssrm").string(), P, 2.5);
  const auto f = read_ssrm((dir / "p.ssrm").string());
  EXPECT_EQ(f.P, P);
  EXPECT_EQ(f.kappa, 2.5f);
  EXPECT_EQ(fs::file_size(dir / "p.ssrm"), 16u + 16u * 6u);
}

TEST(Ssrm, BadMagic) {
  const fs::path dir = temp_dir("ssrm_bad");
  std::ofstream(dir / "x.ssrm") << "NOPE1234";
  EXPECT_THROW(read_ssrm((dir / "x.ssrm").string()), UsageError);
}

TEST(ImageOutput, CsvRowOrder) {
  const fs::path dir = temp_dir("csv");
  write_magnitude_csv((dir / "m.csv").string(), ramp(3));
  std::ifstream in(dir / "m.csv");
  std::string first, last, line;
  std::getline(in, first);
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(first, "20,21,22");
  EXPECT_EQ(last, "0,1,2");
}

TEST(ImageOutput, PngDeterministicAndScaled) {
  const ImageGrid img = ramp(4);
  const std::string a = encode_png_gray(grayscale_pixels(img), 4, 4);
  EXPECT_EQ(a, encode_png_gray(grayscale_pixels(img), 4, 4));
  int w = 0, h = 0;
  const auto px = decode_png(a, w, h);
  EXPECT_EQ(w, 4);
  EXPECT_EQ(h, 4);
  EXPECT_EQ(px[3], 255);                // top right: largest value
  EXPECT_EQ(px[12], 0);                 // bottom left: zero
  EXPECT_EQ(px, grayscale_pixels(img));
}

TEST(ImageOutput, ZeroImageIsBlack) {
  ImageGrid img{{1.0, 6}, 1.0, 1, cmat::Zero(6, 6)};
  int w = 0, h = 0;
  const auto px = decode_png(encode_png_gray(grayscale_pixels(img), 6, 6), w, h);
  EXPECT_EQ(px, std::vector<std::uint8_t>(36, 0));
}

TEST(Experiment, ForwardOnMinimalScene) {
  const auto cfg = parse_config(minimal());
  const auto r = run_imaging_experiment(cfg);
  ASSERT_EQ(r.forward.matrices.size(), 1u);
  EXPECT_EQ(r.forward.matrices[0].P.rows(), 8);
  EXPECT_EQ(r.forward.unknowns, 66);
  ASSERT_EQ(r.images.size(), 1u);
  EXPECT_EQ(r.images[0].values.rows(), 16);
  EXPECT_FALSE(timing_table(r.forward.timings, r.nufft_seconds).empty());
}
