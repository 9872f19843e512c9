#pragma once

// End-to-end drivers: response matrices for a configuration, images per
// harmonic, and the timing summary.

#include <cstdio>
#include <string>
#include <vector>

#include "fdim/config.hpp"
#include "fdim/imaging.hpp"

namespace fdi {

struct ForwardResult {
  std::vector<ResponseMatrix> matrices;  // one per requested harmonic
  ForwardTimings timings;
  int unknowns = 0;
};

inline ForwardResult run_forward(const ExperimentConfig& c) {
  const Scene scene = c.scene();
  const Boundary b = c.boundary();
  ForwardResult r;
  r.unknowns = scene.scatterers.size() + b.size();
  r.matrices = build_response_matrices(scene, b, c.grid(), c.kappa, c.response_spec(),
                                       c.solver_options(), &r.timings);
  return r;
}

struct ImagingResult {
  ForwardResult forward;
  std::vector<ImageGrid> images;
  double nufft_seconds = 0.0;
};

inline ImagingResult image_all(ForwardResult fwd, const ImageSpec& spec) {
  ImagingResult r;
  r.forward = std::move(fwd);
  Stopwatch sw;
  for (const auto& R : r.forward.matrices) r.images.push_back(imaging_nufft(R, spec));
  r.nufft_seconds = sw.seconds();
  return r;
}

inline ImagingResult run_imaging_experiment(const ExperimentConfig& c) {
  return image_all(run_forward(c), c.image);
}

inline std::string timing_table(const ForwardTimings& t, double nufft_seconds) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%-12s %-12s %-12s %-12s\n%-12.3e %-12.3e %-12.3e %-12.3e\n", "T_invert",
                "T_solver", "T_ffp", "T_NUFFT", t.invert, t.solver, t.ffp, nufft_seconds);
  return buf;
}

}  // namespace fdi
