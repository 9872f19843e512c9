// fdim: forward solves, response matrices, imaging and validation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdim/io.hpp"
#include "fdim/validation.hpp"

namespace fs = std::filesystem;
using namespace fdi;

namespace {

constexpr int exit_ok = 0, exit_invalid = 1, exit_numerical = 2;

struct Common {
  std::string config;
  std::string out = ".";
  int threads = 0;
  std::optional<std::uint64_t> seed;
  double hankel_fault = 0.0;
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  if (with_config) cmd->add_option("--config", c.config, "experiment configuration (JSON)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--threads", c.threads, "worker thread cap (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", c.seed, "override the random placement seed");
  cmd->add_option("--hankel-fault", c.hankel_fault)->group("");
}

void apply_common(const Common& c) {
  if (c.threads > 0) set_threads(c.threads);
  testing::hankel_fault = c.hankel_fault;
}

ExperimentConfig load(const Common& c, const std::string& preset = {}) {
  ExperimentConfig cfg;
  if (!preset.empty()) {
    cfg = parse_config(preset_json(preset));
  } else {
    if (c.config.empty()) throw UsageError("--config is required");
    cfg = load_config(c.config);
  }
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw UsageError("cannot create output directory " + dir);
  return p;
}

std::string stem(const ExperimentConfig& cfg, int harmonic) {
  return cfg.name + "_h" + std::to_string(harmonic);
}

nlohmann::json metadata(const ExperimentConfig& cfg, const ForwardResult& fwd) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["wavenumber"] = cfg.kappa;
  j["seed"] = cfg.seed;
  j["nonlinearity"] = to_string(cfg.nonlinearity);
  j["directions"] = cfg.directions;
  j["unknowns"] = fwd.unknowns;
  j["point_scatterers"] = cfg.scatterer_positions().size();
  j["boundary_nodes"] = cfg.boundary_nodes * cfg.obstacles.size();
  for (const auto& R : fwd.matrices)
    j["matrices"].push_back({{"harmonic", R.harmonic},
                             {"wavenumber", R.kappa},
                             {"file", stem(cfg, R.harmonic) + ".ssrm"}});
  return j;
}

void write_forward(const fs::path& out, const ExperimentConfig& cfg, const ForwardResult& fwd) {
  for (const auto& R : fwd.matrices)
    write_ssrm((out / (stem(cfg, R.harmonic) + ".ssrm")).string(), R.P, R.kappa);
  std::ofstream(out / (cfg.name + "_summary.json")) << metadata(cfg, fwd).dump(2) << '\n';
}

void write_images(const fs::path& out, const std::string& base, const std::vector<ImageGrid>& imgs) {
  for (const auto& img : imgs) {
    const std::string s = base + "_h" + std::to_string(img.harmonic);
    write_magnitude_csv((out / (s + ".csv")).string(), img);
    write_png((out / (s + ".png")).string(), img);
    std::cout << "wrote " << (out / (s + ".png")).string() << " (" << img.spec.samples << "x"
              << img.spec.samples << ", kappa=" << img.kappa << ")\n";
  }
}

int cmd_forward(const Common& c, const std::string& preset = {}) {
  const ExperimentConfig cfg = load(c, preset);
  const fs::path out = prepare_out(c.out);
  const ForwardResult fwd = run_forward(cfg);
  write_forward(out, cfg, fwd);
  std::cout << cfg.name << ": " << fwd.matrices.size() << " response matrices ("
            << cfg.directions << "x" << cfg.directions << "), " << fwd.unknowns << " unknowns\n"
            << timing_table(fwd.timings, 0.0);
  return exit_ok;
}

int cmd_image(const Common& c, const std::vector<std::string>& matrices, double half_width,
              int samples, const std::string& preset = {}) {
  const fs::path out = prepare_out(c.out);
  if (matrices.empty()) {
    const ExperimentConfig cfg = load(c, preset);
    const ImagingResult r = run_imaging_experiment(cfg);
    write_forward(out, cfg, r.forward);
    write_images(out, cfg.name, r.images);
    std::cout << timing_table(r.forward.timings, r.nufft_seconds);
    return exit_ok;
  }
  ImageSpec spec;
  std::optional<ExperimentConfig> cfg;
  if (!c.config.empty()) {
    cfg = load(c);
    spec = cfg->image;
  }
  if (half_width > 0.0) spec.half_width = half_width;
  if (samples > 0) spec.samples = samples;
  for (std::size_t q = 0; q < matrices.size(); ++q) {
    const SsrmFile f = read_ssrm(matrices[q]);
    if (cfg && (f.P.rows() != cfg->directions || f.P.cols() != cfg->directions))
      throw UsageError(matrices[q] + ": matrix is " + std::to_string(f.P.rows()) + "x" +
                       std::to_string(f.P.cols()) + " but the configuration has " +
                       std::to_string(cfg->directions) + " directions");
    ResponseMatrix R{f.P, double(f.kappa), 1, {int(f.P.rows()), int(f.P.cols())}};
    Stopwatch sw;
    ImageGrid img = imaging_nufft(R, spec);
    img.harmonic = static_cast<int>(q) + 1;
    const std::string base = fs::path(matrices[q]).stem().string();
    const std::string s = (out / base).string();
    write_magnitude_csv(s + ".csv", img);
    write_png(s + ".png", img);
    std::cout << "wrote " << s << ".png (" << spec.samples << "x" << spec.samples
              << ", kappa=" << R.kappa << ", " << sw.seconds() << " s)\n";
  }
  return exit_ok;
}

int cmd_validate(bool full, bool list, const std::vector<int>& only) {
  if (list) {
    for (const auto& s : suites())
      std::cout << s.id << " " << s.name << (s.fast ? "" : " (full)") << '\n';
    return exit_ok;
  }
  PresetCache cache;
  bool ok = true;
  for (const auto& s : suites()) {
    const bool selected = only.empty() ? (full || s.fast)
                                       : std::find(only.begin(), only.end(), s.id) != only.end();
    if (!selected) continue;
    const CriterionResult r = run_criterion(s.id, cache);
    std::cout << format_result(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? exit_ok : exit_invalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaging of extended obstacles with linear and nonlinear point scatterers"};
  app.require_subcommand(1);
  Common common;

  auto* forward = app.add_subcommand("forward", "solve the forward problem and write response matrices");
  add_common(forward, common, true);

  auto* image = app.add_subcommand("image", "image from a configuration or from matrix files");
  add_common(image, common, true);
  std::vector<std::string> matrices;
  double half_width = 0.0;
  int samples = 0;
  image->add_option("--matrix", matrices, "SSRM matrix file(s) to image")->check(CLI::ExistingFile);
  image->add_option("--half-width", half_width, "image half width L (matrix mode)");
  image->add_option("--samples", samples, "samples per axis (matrix mode)");

  auto* validate = app.add_subcommand("validate", "run the acceptance suites");
  add_common(validate, common, false);
  bool full = false, list = false;
  std::vector<int> only;
  validate->add_flag("--full", full, "also run the slow suites");
  validate->add_flag("--list", list, "list the suites and exit");
  validate->add_option("--only", only, "run only these criterion ids")->delimiter(',');

  auto* preset = app.add_subcommand("preset", "run a built-in example (forward and imaging)");
  add_common(preset, common, false);
  std::string preset_name;
  bool forward_only = false, show = false;
  preset->add_option("name", preset_name, "preset name")
      ->check(CLI::IsMember(preset_names()));
  preset->add_flag("--forward-only", forward_only, "write response matrices only");
  preset->add_flag("--show", show, "print the preset configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    apply_common(common);
    if (*forward) return cmd_forward(common);
    if (*image) return cmd_image(common, matrices, half_width, samples);
    if (*validate) return cmd_validate(full, list, only);
    if (*preset) {
      if (preset_name.empty()) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return exit_ok;
      }
      if (show) {
        std::cout << preset_json(preset_name).dump(2) << '\n';
        return exit_ok;
      }
      return forward_only ? cmd_forward(common, preset_name)
                          : cmd_image(common, {}, 0.0, 0, preset_name);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_ok;
}
