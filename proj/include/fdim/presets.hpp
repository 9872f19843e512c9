#pragma once

// Built-in experiment presets. The files under presets/ carry the same JSON.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdim/common.hpp"

namespace fdi {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "example1", "example2", "example3", "example3_fixed", "example4", "example4_far", "example5", "example6"};
  return names;
}

inline nlohmann::json preset_json(const std::string& name) {
  if (name == "example1")
    return nlohmann::json::parse(R"({"name":"example1","schema_version":1,"wavenumber":10.0,"obstacles":[{"kind":"five_leaf","center":[-3.0,0.0],"rotation":0.0},{"kind":"five_leaf","center":[3.0,0.0],"rotation":0.0}],"boundary_nodes":300,"point_scatterers":{"nonlinearity":"linear","placement":"annulus","annulus":{"count":1000,"inner":10.0,"outer":11.0},"coefficients":{"sigma":0.5}},"directions":360,"image":{"half_width":7.5,"samples":500,"harmonics":[1]},"modality":"plain","amplitude":1.0,"seed":1})");
  if (name == "example2")
    return nlohmann::json::parse(R"({"name":"example2","schema_version":1,"wavenumber":50.0,"obstacles":[{"kind":"five_leaf","center":[-3.0,0.0],"rotation":0.0},{"kind":"five_leaf","center":[3.0,0.0],"rotation":0.0}],"boundary_nodes":2400,"point_scatterers":{"nonlinearity":"linear","placement":"annulus","annulus":{"count":1000,"inner":10.0,"outer":11.0},"coefficients":{"sigma":0.5}},"directions":1800,"image":{"half_width":7.5,"samples":500,"harmonics":[1]},"modality":"plain","amplitude":1.0,"seed":1})");
  if (name == "example3")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example3","wavenumber":2.0,"obstacles":[{"kind":"five_leaf","center":[0.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"quadratic","placement":"aligned","radii":[13.0,14.0],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4]}},"directions":360,"image":{"half_width":5.0,"samples":500,"harmonics":[1,2]},"modality":"gfl_minus_fl","amplitude":1.0,"seed":1})");
  if (name == "example3_fixed")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example3_fixed","wavenumber":2.0,"obstacles":[{"kind":"five_leaf","center":[0.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"quadratic","placement":"fixed","positions":[[-13.0,0.0],[-14.0,0.0]],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4]}},"directions":360,"image":{"half_width":5.0,"samples":500,"harmonics":[1,2]},"modality":"plain","amplitude":1.0,"seed":1})");
  if (name == "example4")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example4","wavenumber":5.0,"obstacles":[{"kind":"five_leaf","center":[-3.0,0.0],"rotation":0.0},{"kind":"five_leaf","center":[3.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"quadratic","placement":"aligned","radii":[13.0,14.0],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4]}},"directions":360,"image":{"half_width":7.5,"samples":500,"harmonics":[1,2]},"modality":"gfl_minus_fl","amplitude":1.0,"seed":1})");
  if (name == "example4_far")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example4_far","wavenumber":5.0,"obstacles":[{"kind":"five_leaf","center":[-3.0,0.0],"rotation":0.0},{"kind":"five_leaf","center":[3.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"quadratic","placement":"aligned","radii":[130.0,131.0],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4]}},"directions":360,"image":{"half_width":7.5,"samples":500,"harmonics":[1,2]},"modality":"gfl_minus_fl","amplitude":1.0,"seed":1})");
  if (name == "example5")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example5","wavenumber":2.0,"obstacles":[{"kind":"five_leaf","center":[0.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"cubic","placement":"aligned","radii":[13.0,14.0],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4,0.4]}},"directions":360,"image":{"half_width":5.0,"samples":500,"harmonics":[1,3]},"modality":"gfl_minus_fl","amplitude":1.0,"seed":1})");
  if (name == "example6")
    return nlohmann::json::parse(R"({"schema_version":1,"name":"example6","wavenumber":5.0,"obstacles":[{"kind":"five_leaf","center":[-3.0,0.0],"rotation":0.0},{"kind":"five_leaf","center":[3.0,0.0],"rotation":0.0}],"boundary_nodes":600,"point_scatterers":{"nonlinearity":"cubic","placement":"aligned","radii":[13.0,14.0],"coefficients":{"linear":[0.5,0.5],"nonlinear":[0.4,0.4,0.4]}},"directions":360,"image":{"half_width":7.5,"samples":500,"harmonics":[1,3]},"modality":"gfl_minus_fl","amplitude":1.0,"seed":1})");
  throw UsageError("unknown preset '" + name + "'");
}

}  // namespace fdi
