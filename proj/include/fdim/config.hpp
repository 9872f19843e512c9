#pragma once

// JSON experiment configuration. Every field is validated before any
// computation starts; errors name the offending field.

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdim/farfield.hpp"
#include "fdim/imaging.hpp"

namespace fdi {

inline constexpr int config_schema_version = 1;

enum class Placement { fixed, annulus, aligned };

struct ExperimentConfig {
  std::string name = "experiment";
  double kappa = 1.0;
  std::vector<ParametricCurve> obstacles;
  int boundary_nodes = 256;  // per obstacle
  Nonlinearity nonlinearity = Nonlinearity::linear;
  Placement placement = Placement::fixed;
  std::vector<Vec2> positions;        // fixed placement
  int annulus_count = 0;              // annulus placement
  double annulus_inner = 10.0, annulus_outer = 11.0;
  std::vector<double> radii;          // aligned placement
  ScattererCoefficients coefficients;
  int directions = 64;
  ImageSpec image;
  std::vector<int> harmonics{1};
  Modality modality = Modality::plain;  // for the higher harmonic
  std::optional<double> eta;
  int quadrature_order = default_quadrature_order;
  double amplitude = 1.0;
  TrustRegionOptions newton;
  std::uint64_t seed = 1;

  HarmonicSet harmonic_set() const { return HarmonicSet::for_nonlinearity(kappa, nonlinearity); }

  SolverOptions solver_options() const { return {eta, quadrature_order, newton}; }

  DirectionGrid grid() const { return {directions, directions}; }

  ResponseSpec response_spec() const {
    ResponseSpec s;
    s.harmonics = harmonics;
    s.higher_modality = modality;
    if (placement == Placement::aligned) s.aligned_radii = radii;
    s.amplitude = amplitude;
    return s;
  }

  /// Scatterer positions; aligned sets start at incidence angle 0.
  std::vector<Vec2> scatterer_positions() const {
    switch (placement) {
      case Placement::fixed: return positions;
      case Placement::aligned: return place_aligned_point_scatterers(radii, 0.0);
      case Placement::annulus: {
        std::mt19937_64 rng(seed);
        auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
        std::vector<Vec2> p;
        for (int k = 0; k < annulus_count; ++k) {
          const double theta = two_pi * uniform();
          const double r = annulus_inner + (annulus_outer - annulus_inner) * uniform();
          p.push_back(r * unit_vector(theta));
        }
        return p;
      }
    }
    return {};
  }

  Scene scene() const {
    Scene s;
    s.obstacles = obstacles;
    const auto pos = scatterer_positions();
    s.scatterers = PointScattererSet::uniform(nonlinearity, pos, coefficients);
    return s;
  }

  Boundary boundary() const { return Boundary(obstacles, boundary_nodes); }
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail(path + key, "has the wrong type");
  }
}

inline Vec2 get_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    config_fail(path, "must be a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ParametricCurve parse_obstacle(const json& j, const std::string& path) {
  if (!j.is_object()) config_fail(path, "must be an object");
  const std::string kind = get_field<std::string>(j, "kind", path + ".", "five_leaf");
  const Vec2 center = j.contains("center") ? get_vec2(j["center"], path + ".center") : Vec2{};
  const double rot = get_field<double>(j, "rotation", path + ".", 0.0);
  if (kind == "five_leaf") return ParametricCurve::five_leaf(center, rot);
  if (kind == "circle") {
    const double r = get_field<double>(j, "radius", path + ".", 1.0);
    if (!(r > 0.0)) config_fail(path + ".radius", "must be positive");
    return ParametricCurve::circle(r, center);
  }
  if (kind == "custom") {
    const double a0 = get_field<double>(j, "a0", path + ".", 1.0);
    const auto a = get_field<std::vector<double>>(j, "cos", path + ".", {});
    const auto b = get_field<std::vector<double>>(j, "sin", path + ".", {});
    ParametricCurve c(a0, a, b, center, rot);
    for (int i = 0; i < 720; ++i)
      if (c.radial(two_pi * i / 720)[0] <= 0.0)
        config_fail(path, "radial function must stay positive");
    return c;
  }
  config_fail(path + ".kind", "unknown obstacle kind '" + kind + "'");
}

inline Nonlinearity parse_nonlinearity(const std::string& s, const std::string& path) {
  if (s == "linear") return Nonlinearity::linear;
  if (s == "quadratic") return Nonlinearity::quadratic;
  if (s == "cubic") return Nonlinearity::cubic;
  config_fail(path, "must be linear, quadratic or cubic");
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::config_fail;
  using detail::get_field;
  if (!j.is_object()) config_fail("config", "must be a JSON object");
  ExperimentConfig c;
  const int version = get_field<int>(j, "schema_version", "", -1);
  if (version != config_schema_version)
    config_fail("schema_version", "must be " + std::to_string(config_schema_version));
  c.name = get_field<std::string>(j, "name", "", c.name);
  c.kappa = get_field<double>(j, "wavenumber", "", 0.0);
  if (!(c.kappa > 0.0)) config_fail("wavenumber", "must be positive");

  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) config_fail("obstacles", "must be an array");
    for (std::size_t i = 0; i < j["obstacles"].size(); ++i)
      c.obstacles.push_back(
          detail::parse_obstacle(j["obstacles"][i], "obstacles[" + std::to_string(i) + "]"));
  }
  c.boundary_nodes = get_field<int>(j, "boundary_nodes", "", c.boundary_nodes);
  if (!c.obstacles.empty() && (c.boundary_nodes < 16 || c.boundary_nodes % 2 != 0))
    config_fail("boundary_nodes", "must be even and at least 16");
  c.quadrature_order = get_field<int>(j, "quadrature_order", "", c.quadrature_order);
  try {
    const AlpertRule& rule = alpert_rule(c.quadrature_order);
    if (!c.obstacles.empty() && c.boundary_nodes < minimum_nodes(rule))
      config_fail("boundary_nodes", "too few for quadrature order " +
                                        std::to_string(c.quadrature_order));
  } catch (const ConfigError& e) {
    if (std::string(e.what()).rfind("boundary_nodes", 0) == 0) throw;
    config_fail("quadrature_order", "must be 4, 8, 12 or 16");
  }

  if (j.contains("point_scatterers") && !j["point_scatterers"].is_null()) {
    const auto& ps = j["point_scatterers"];
    const std::string p = "point_scatterers.";
    c.nonlinearity = detail::parse_nonlinearity(
        get_field<std::string>(ps, "nonlinearity", p, "linear"), p + "nonlinearity");
    const std::string placement = get_field<std::string>(ps, "placement", p, "fixed");
    if (placement == "fixed") {
      c.placement = Placement::fixed;
      if (ps.contains("positions")) {
        if (!ps["positions"].is_array()) config_fail(p + "positions", "must be an array");
        for (std::size_t i = 0; i < ps["positions"].size(); ++i)
          c.positions.push_back(
              detail::get_vec2(ps["positions"][i], p + "positions[" + std::to_string(i) + "]"));
      }
    } else if (placement == "annulus") {
      c.placement = Placement::annulus;
      if (!ps.contains("annulus")) config_fail(p + "annulus", "is required for annulus placement");
      const auto& a = ps["annulus"];
      c.annulus_count = get_field<int>(a, "count", p + "annulus.", 0);
      c.annulus_inner = get_field<double>(a, "inner", p + "annulus.", c.annulus_inner);
      c.annulus_outer = get_field<double>(a, "outer", p + "annulus.", c.annulus_outer);
      if (c.annulus_count < 1) config_fail(p + "annulus.count", "must be positive");
      if (!(c.annulus_inner > 0.0 && c.annulus_outer > c.annulus_inner))
        config_fail(p + "annulus", "needs 0 < inner < outer");
    } else if (placement == "aligned") {
      c.placement = Placement::aligned;
      c.radii = get_field<std::vector<double>>(ps, "radii", p, {});
      if (c.radii.empty()) config_fail(p + "radii", "is required for aligned placement");
      for (std::size_t i = 0; i < c.radii.size(); ++i)
        if (!(c.radii[i] > 0.0) || (i > 0 && c.radii[i] <= c.radii[i - 1]))
          config_fail(p + "radii", "must be positive and strictly increasing");
    } else {
      config_fail(p + "placement", "must be fixed, annulus or aligned");
    }
    if (ps.contains("coefficients")) {
      const auto& co = ps["coefficients"];
      const std::string q = p + "coefficients.";
      if (c.nonlinearity == Nonlinearity::linear) {
        c.coefficients.lin1 = get_field<double>(co, "sigma", q, 0.0);
        if (c.coefficients.lin1 < 0.0) config_fail(q + "sigma", "must be non-negative");
      } else {
        const auto lin = get_field<std::vector<double>>(co, "linear", q, {});
        const auto nl = get_field<std::vector<double>>(co, "nonlinear", q, {});
        const std::size_t want = c.nonlinearity == Nonlinearity::quadratic ? 2 : 3;
        if (lin.size() != 2) config_fail(q + "linear", "needs two values");
        if (nl.size() != want)
          config_fail(q + "nonlinear", "needs " + std::to_string(want) + " values");
        c.coefficients.lin1 = lin[0];
        c.coefficients.lin2 = lin[1];
        c.coefficients.nl1 = nl[0];
        c.coefficients.nl2 = nl[1];
        if (want == 3) c.coefficients.nl3 = nl[2];
      }
    }
  }

  c.directions = get_field<int>(j, "directions", "", c.directions);
  if (c.directions < 1) config_fail("directions", "must be positive");

  if (j.contains("image")) {
    const auto& im = j["image"];
    c.image.half_width = get_field<double>(im, "half_width", "image.", c.image.half_width);
    c.image.samples = get_field<int>(im, "samples", "image.", c.image.samples);
    c.harmonics = get_field<std::vector<int>>(im, "harmonics", "image.", c.harmonics);
    if (!(c.image.half_width > 0.0)) config_fail("image.half_width", "must be positive");
    if (c.image.samples < 2 || c.image.samples % 2 != 0)
      config_fail("image.samples", "must be even and at least 2");
  }
  for (int h : c.harmonics)
    if (h != 1 && (c.nonlinearity == Nonlinearity::linear || h != higher_harmonic(c.nonlinearity)))
      config_fail("image.harmonics", "harmonic " + std::to_string(h) + " is not generated");
  for (int h : c.harmonics) {
    const double kh = h * c.kappa;
    if (c.image.samples < ImageSpec::minimal_samples(kh, c.image.half_width))
      config_fail("image.samples", "must be at least " +
                                       std::to_string(ImageSpec::minimal_samples(kh, c.image.half_width)) +
                                       " for harmonic " + std::to_string(h));
  }

  const std::string mod = get_field<std::string>(j, "modality", "", "plain");
  if (mod == "plain") c.modality = Modality::plain;
  else if (mod == "gfl_minus_fl") c.modality = Modality::gfl_minus_fl;
  else config_fail("modality", "must be plain or gfl_minus_fl");
  if (c.modality == Modality::gfl_minus_fl && c.nonlinearity == Nonlinearity::linear)
    config_fail("modality", "gfl_minus_fl needs nonlinear point scatterers");

  if (j.contains("coupling") && !j["coupling"].is_null()) {
    c.eta = get_field<double>(j, "coupling", "", 0.0);
    if (!(*c.eta > 0.0)) config_fail("coupling", "must be positive");
  }
  c.amplitude = get_field<double>(j, "amplitude", "", c.amplitude);
  if (!(c.amplitude > 0.0)) config_fail("amplitude", "must be positive");

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.newton.residual_tol = get_field<double>(s, "residual_tol", "solver.", c.newton.residual_tol);
    c.newton.step_tol = get_field<double>(s, "step_tol", "solver.", c.newton.step_tol);
    c.newton.max_iterations = get_field<int>(s, "max_iterations", "solver.", c.newton.max_iterations);
    c.newton.initial_radius = get_field<double>(s, "initial_radius", "solver.", c.newton.initial_radius);
    if (!(c.newton.residual_tol > 0.0) || !(c.newton.step_tol > 0.0) ||
        c.newton.max_iterations < 1 || !(c.newton.initial_radius > 0.0))
      config_fail("solver", "tolerances, radius and iteration cap must be positive");
  }
  c.seed = get_field<std::uint64_t>(j, "seed", "", c.seed);

  const bool has_points = (c.placement == Placement::fixed && !c.positions.empty()) ||
                          (c.placement == Placement::annulus && c.annulus_count > 0) ||
                          (c.placement == Placement::aligned && !c.radii.empty());
  if (c.obstacles.empty() && !has_points)
    config_fail("scene", "needs at least one obstacle or point scatterer");
  try {
    c.scene().validate();
  } catch (const ConfigError& e) {
    config_fail("point_scatterers", e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace fdi
