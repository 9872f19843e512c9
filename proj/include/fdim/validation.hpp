#pragma once

// Acceptance suites and the independent oracles behind them: the
// separation-of-variables series for the unit circle, direct NUFFT sums,
// Picard iteration for the nonlinear systems and the Born point-spread
// function.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fdim/analysis.hpp"
#include "fdim/experiment.hpp"
#include "fdim/presets.hpp"

namespace fdi {

// ---------------------------------------------------------------- oracles

/// Far field of a plane wave propagating along angle beta scattered by a
/// sound-soft circle of radius a centred at the origin.
inline cplx circle_series_far_field(double kappa, double a, double beta, double theta) {
  const int nmax = static_cast<int>(kappa * a) + 40;
  cplx sum = 0.0;
  for (int n = -nmax; n <= nmax; ++n) {
    const double nu = std::abs(n);
    const double j = std::cyl_bessel_j(nu, kappa * a), y = std::cyl_neumann(nu, kappa * a);
    sum += j / cplx(j, y) * std::exp(I * double(n) * (theta - beta));
  }
  return -std::sqrt(2.0 / (pi * kappa)) * std::exp(-I * pi / 4.0) * sum;
}

/// Exterior scattered field of the same problem.
inline cplx circle_series_field(double kappa, double a, double beta, Vec2 r) {
  const int nmax = static_cast<int>(kappa * std::max(a, norm(r))) + 40;
  const double rho = norm(r), theta = std::atan2(r.y, r.x);
  cplx sum = 0.0;
  for (int n = -nmax; n <= nmax; ++n) {
    const double nu = std::abs(n);
    const double ja = std::cyl_bessel_j(nu, kappa * a), ya = std::cyl_neumann(nu, kappa * a);
    const cplx hr(std::cyl_bessel_j(nu, kappa * rho), std::cyl_neumann(nu, kappa * rho));
    sum += std::pow(I, nu) * ja / cplx(ja, ya) * hr * std::exp(I * double(n) * (theta - beta));
  }
  return -sum;
}

inline cvec direct_sum_1d(const rvec& xi, const cvec& c, int m) {
  cvec f = cvec::Zero(m);
  for (int i = 0; i < m; ++i) {
    const double x = i - m / 2;
    for (Eigen::Index j = 0; j < c.size(); ++j) f[i] += c[j] * std::exp(I * xi[j] * x);
  }
  return f;
}

inline cplx direct_sum_2d(const rvec& xi, const rvec& eta, const cvec& c, int m, int ix, int iy) {
  const double x = ix - m / 2, y = iy - m / 2;
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) s += c[j] * std::exp(I * (xi[j] * x + eta[j] * y));
  return s;
}

struct PicardResult {
  ExternalFields fields;
  cvec density1, densityh;
  int iterations = 0;
  double last_change = 0.0;
};

/// Fixed-point iteration of the coupled equations: every sweep solves the
/// boundary equations for the current point strengths and updates the
/// point fields from the full (unreduced) representation. With an empty
/// boundary this is Picard iteration of the Foldy-Lax equations.
inline PicardResult picard_coupled(const Boundary& b, const PointScattererSet& set,
                                   const IncidentWave& wave, const SolverOptions& opt = {},
                                   double tol = 1e-14, int max_iterations = 2000) {
  const Nonlinearity kind = set.nonlinearity;
  const int m = set.size(), N = b.size();
  const bool nonlinear = kind != Nonlinearity::linear;
  const int h = nonlinear ? higher_harmonic(kind) : 1;
  const double k1 = wave.kappa, kh = h * wave.kappa;

  std::unique_ptr<CfieSolver> K1, Kh;
  GflBlocks b1{green_offdiagonal(set.positions, k1), {}, {}}, bh;
  cvec g1;
  if (N > 0) {
    K1 = std::make_unique<CfieSolver>(b, k1, opt.eta_for(k1), opt.quadrature_order);
    b1 = gfl_blocks(b, set.positions, k1, K1->eta());
    g1 = cfie_rhs(b, wave, K1->eta());
  }
  if (nonlinear) {
    bh = {green_offdiagonal(set.positions, kh), {}, {}};
    if (N > 0) {
      Kh = std::make_unique<CfieSolver>(b, kh, opt.eta_for(kh), opt.quadrature_order);
      bh = gfl_blocks(b, set.positions, kh, Kh->eta());
    }
  }
  const cvec inc = incident_at(set.positions, wave);

  PicardResult r;
  r.fields.kind = kind;
  r.fields.first = inc;
  if (nonlinear) r.fields.higher = cvec::Zero(m);
  for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
    const cvec s1 = source_strengths(set, r.fields, 1);
    cvec p1 = inc + b1.Goff * s1;
    if (N > 0) {
      r.density1 = K1->solve(cvec(g1 + b1.B * s1));
      p1 -= b1.M * r.density1;
    }
    cvec ph;
    if (nonlinear) {
      const cvec sh = source_strengths(set, r.fields, h);
      ph = bh.Goff * sh;
      if (N > 0) {
        r.densityh = Kh->solve(cvec(bh.B * sh));
        ph -= bh.M * r.densityh;
      }
    }
    double change = inf_norm(p1 - r.fields.first);
    if (nonlinear) change = std::max(change, inf_norm(ph - r.fields.higher));
    r.fields.first = p1;
    if (nonlinear) r.fields.higher = ph;
    r.last_change = change;
    if (change <= tol * (1.0 + inf_norm(p1))) break;
  }
  if (r.iterations > max_iterations)
    throw ConvergenceError("Picard iteration did not converge", r.last_change, max_iterations);
  if (N > 0 && m == 0) r.density1 = K1->solve(g1);
  if (N > 0 && nonlinear && m == 0) r.densityh = cvec::Zero(N);
  return r;
}

// ---------------------------------------------------------------- suites

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

inline double rel_max_diff(const cmat& a, const cmat& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

inline std::vector<Vec2> directions(int n) {
  std::vector<Vec2> d(n);
  for (int i = 0; i < n; ++i) d[i] = unit_vector(two_pi * i / n);
  return d;
}

}  // namespace detail

struct CircleOracleReport {
  double error = 0.0;
  double seconds = 0.0;
};

/// Unit circle, plane wave, far field at 64 directions vs the series.
inline CircleOracleReport circle_oracle(double kappa = 5.0, int nodes = 256, int order = 16,
                                        double beta = 0.3) {
  Stopwatch sw;
  const Boundary b(sample_boundary(ParametricCurve::circle(1.0), nodes));
  const IncidentWave wave = IncidentWave::from_angle(kappa, beta);
  const cvec psi = solve_cfie(b, kappa, kappa, wave, order);
  double err = 0.0, scale = 0.0;
  for (const Vec2 r : detail::directions(64)) {
    const cplx ref = circle_series_far_field(kappa, 1.0, beta, std::atan2(r.y, r.x));
    err = std::max(err, std::abs(far_field_boundary(b, psi, kappa, r) - ref));
    scale = std::max(scale, std::abs(ref));
  }
  return {err / scale, sw.seconds()};
}

inline CriterionResult check_circle_oracle() {
  CriterionResult c{1, "circle oracle: BIE far field vs series"};
  const auto r = circle_oracle();
  c.seconds = r.seconds;
  c.passed = r.error <= 1e-8 && r.seconds < 5.0;
  c.detail = "rel Linf " + detail::sci(r.error) + " (<= 1e-8), " + detail::fmt("%.2f s (< 5 s)", r.seconds);
  return c;
}

struct NufftOracleReport {
  double error1d = 0.0, error2d = 0.0;
  double ratio_small = 0.0, ratio_large = 0.0;
};

inline double nufft1d_time(int K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rvec xi(K);
  cvec c(K);
  for (int j = 0; j < K; ++j) xi[j] = pi * u(rng), c[j] = cplx(u(rng), u(rng));
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    Stopwatch sw;
    const cvec f = nufft1d_type1(xi, c, K);
    best = std::min(best, sw.seconds());
    if (!std::isfinite(f[0].real())) best = 1e300;
  }
  return best;
}

inline NufftOracleReport nufft_oracle(bool timing = true) {
  NufftOracleReport r;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 10000, m = 512;
  rvec xi(n), eta(n);
  cvec c(n);
  for (int j = 0; j < n; ++j) {
    xi[j] = pi * u(rng);
    eta[j] = pi * u(rng);
    c[j] = cplx(u(rng), u(rng));
  }
  // Include the interval ends.
  xi[0] = -pi, xi[1] = pi, eta[2] = -pi, eta[3] = pi;
  const double l1 = c.cwiseAbs().sum();

  const cvec f = nufft1d_type1(xi, c, m);
  r.error1d = (f - direct_sum_1d(xi, c, m)).cwiseAbs().maxCoeff() / l1;

  const cmat F = nufft2d_type1(xi, eta, c, m);
  std::uniform_int_distribution<int> pick(0, m - 1);
  double e2 = 0.0;
  for (int q = 0; q < 64; ++q) {
    const int ix = q < 4 ? (q % 2) * (m - 1) : pick(rng), iy = q < 4 ? (q / 2) * (m - 1) : pick(rng);
    e2 = std::max(e2, std::abs(F(ix, iy) - direct_sum_2d(xi, eta, c, m, ix, iy)));
  }
  r.error2d = e2 / l1;

  if (timing) {
    const double t14 = nufft1d_time(1 << 14, rng), t16 = nufft1d_time(1 << 16, rng),
                 t18 = nufft1d_time(1 << 18, rng);
    r.ratio_small = t16 / t14;
    r.ratio_large = t18 / t16;
  }
  return r;
}

inline CriterionResult check_nufft_oracle() {
  CriterionResult c{2, "NUFFT oracle: type-1 vs direct sums"};
  Stopwatch sw;
  const auto r = nufft_oracle();
  c.seconds = sw.seconds();
  c.passed = r.error1d <= 1e-10 && r.error2d <= 1e-9 && r.ratio_small <= 6.0 && r.ratio_large <= 6.0;
  c.detail = "1D " + detail::sci(r.error1d) + " (<= 1e-10), 2D " + detail::sci(r.error2d) +
             " (<= 1e-9), time ratios " + detail::fmt("%.2f", r.ratio_small) + ", " +
             detail::fmt("%.2f", r.ratio_large) + " (<= 6)";
  return c;
}

/// 360 x 360 data shaped like a scattered response: Born responses of a few
/// scatterers plus a weak random component.
inline ResponseMatrix synthetic_response(int directions, double kappa, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ResponseMatrix R = born_response({1.2, -0.4}, directions, kappa);
  for (const Vec2 p : {Vec2{-3.0, 2.0}, Vec2{4.1, 3.3}, Vec2{-5.0, -6.0}})
    R.P += 0.5 * born_response(p, directions, kappa).P;
  for (Eigen::Index j = 0; j < R.P.cols(); ++j)
    for (Eigen::Index i = 0; i < R.P.rows(); ++i) R.P(i, j) += 1e-3 * cplx(u(rng), u(rng));
  return R;
}

struct ImagingEquivalenceReport {
  double deviation = 0.0, direct_seconds = 0.0, nufft_seconds = 0.0;
};

inline ImagingEquivalenceReport imaging_equivalence(int directions = 360, int samples = 500,
                                                    double kappa = 10.0, double half_width = 7.5) {
  const ResponseMatrix R = synthetic_response(directions, kappa, 7);
  const ImageSpec spec{half_width, samples};
  ImagingEquivalenceReport r;
  Stopwatch sw;
  const ImageGrid fast = imaging_nufft(R, spec);
  r.nufft_seconds = sw.seconds();
  sw.reset();
  const ImageGrid slow = imaging_direct(R, spec);
  r.direct_seconds = sw.seconds();
  r.deviation = (fast.values - slow.values).cwiseAbs().maxCoeff() / slow.magnitude().maxCoeff();
  return r;
}

inline CriterionResult check_imaging_equivalence() {
  CriterionResult c{3, "imaging fast path vs direct evaluation"};
  Stopwatch sw;
  const auto r = imaging_equivalence();
  c.seconds = sw.seconds();
  const double speedup = r.direct_seconds / r.nufft_seconds;
  c.passed = r.deviation <= 1e-8 && speedup >= 50.0;
  c.detail = "rel max deviation " + detail::sci(r.deviation) + " (<= 1e-8), speedup " +
             detail::fmt("%.0fx", speedup) + " (>= 50x; direct " +
             detail::fmt("%.2f s", r.direct_seconds) + ", NUFFT " +
             detail::fmt("%.3f s)", r.nufft_seconds);
  return c;
}

struct ReductionReport {
  double bie = 0.0;         // sigma = 0 vs pure BIE
  double fl = 0.0;          // no obstacle vs Foldy-Lax
  double nonlinear = 0.0;   // zeroed nonlinear coefficients vs linear
  double higher = 0.0;      // largest higher-harmonic value in that case
};

inline ReductionReport reductions() {
  ReductionReport r;
  const double kappa = 3.0;
  const auto rhat = detail::directions(32);
  const IncidentWave wave = IncidentWave::from_angle(kappa, 0.7);
  const Boundary b({ParametricCurve::five_leaf({0.5, -0.2}, 0.3)}, 192);
  const std::vector<Vec2> pos{{-4.0, 1.0}, {3.5, 3.0}, {0.5, -4.5}};

  {
    const auto zero = PointScattererSet::uniform(Nonlinearity::linear, pos, {});
    const CoupledSolution s = solve_gfl_linear(b, zero, wave);
    const cvec psi = solve_cfie(b, kappa, kappa, wave);
    cmat a(32, 1), ref(32, 1);
    for (int i = 0; i < 32; ++i) {
      a(i, 0) = far_field(b, zero, s, rhat[i], 1);
      ref(i, 0) = far_field_boundary(b, psi, kappa, rhat[i]);
    }
    r.bie = detail::rel_max_diff(a, ref);
  }
  {
    ScattererCoefficients c;
    c.lin1 = 0.5;
    const auto set = PointScattererSet::uniform(Nonlinearity::linear, pos, c);
    const Boundary none;
    const CoupledSolution s = solve_gfl_linear(none, set, wave);
    const ExternalFields f = solve_linear_fl(set, wave);
    cmat a(32, 1), ref(32, 1);
    for (int i = 0; i < 32; ++i) {
      a(i, 0) = far_field(none, set, s, rhat[i], 1);
      ref(i, 0) = far_field(set, f, rhat[i], 1, kappa);
    }
    r.fl = detail::rel_max_diff(a, ref);
  }
  {
    ScattererCoefficients lin;
    lin.lin1 = 0.5;
    lin.lin2 = 0.3;
    const auto linear = PointScattererSet::uniform(Nonlinearity::linear, pos, lin);
    const CoupledSolution base = solve_gfl_linear(b, linear, wave);
    cmat ref(32, 1);
    for (int i = 0; i < 32; ++i) ref(i, 0) = far_field(b, linear, base, rhat[i], 1);
    for (Nonlinearity kind : {Nonlinearity::quadratic, Nonlinearity::cubic}) {
      const auto set = PointScattererSet::uniform(kind, pos, lin);
      const CoupledSolution s = solve_gfl(b, set, wave);
      const int h = higher_harmonic(kind);
      cmat a(32, 1);
      for (int i = 0; i < 32; ++i) {
        a(i, 0) = far_field(b, set, s, rhat[i], 1);
        r.higher = std::max(r.higher, std::abs(far_field(b, set, s, rhat[i], h)));
      }
      r.higher = std::max({r.higher, inf_norm(s.fields.higher), inf_norm(s.densityh)});
      r.nonlinear = std::max(r.nonlinear, detail::rel_max_diff(a, ref));
    }
  }
  return r;
}

inline CriterionResult check_reductions() {
  CriterionResult c{4, "reduction chain"};
  Stopwatch sw;
  const auto r = reductions();
  c.seconds = sw.seconds();
  c.passed = r.bie <= 1e-12 && r.fl <= 1e-12 && r.nonlinear <= 1e-10 && r.higher == 0.0;
  c.detail = "sigma=0 vs BIE " + detail::sci(r.bie) + " (<= 1e-12), no obstacle vs FL " +
             detail::sci(r.fl) + " (<= 1e-12), zeroed nonlinearity " + detail::sci(r.nonlinear) +
             " (<= 1e-10), higher harmonic max " + detail::sci(r.higher) + " (== 0)";
  return c;
}

struct CrossCheckReport {
  double difference = 0.0;
  int max_newton_iterations = 0;
};

/// Schur + Newton vs Picard on a preset's scene, fixed scatterer positions
/// aligned with each tested incidence.
inline CrossCheckReport nonlinear_cross_check(const ExperimentConfig& cfg,
                                              const std::vector<double>& betas) {
  CrossCheckReport r;
  const Boundary b = cfg.boundary();
  const SolverOptions opt = cfg.solver_options();
  const SchurGflSolver solver(b, cfg.nonlinearity, cfg.kappa, opt);
  const PointScattererSet base = cfg.scene().scatterers;
  for (double beta : betas) {
    const PointScattererSet set =
        cfg.placement == Placement::aligned
            ? base.with_positions(place_aligned_point_scatterers(cfg.radii, beta))
            : base;
    const IncidentWave wave{cfg.kappa, -unit_vector(beta), cfg.amplitude};
    const CoupledSolution s = solver.solve(set, wave);
    const PicardResult p = picard_coupled(b, set, wave, opt);
    r.max_newton_iterations = std::max(r.max_newton_iterations, s.iterations);
    auto diff = [](const cvec& a, const cvec& b) { return inf_norm(a - b) / (1.0 + inf_norm(b)); };
    r.difference = std::max({r.difference, diff(s.fields.first, p.fields.first),
                             diff(s.fields.higher, p.fields.higher), diff(s.density1, p.density1),
                             diff(s.densityh, p.densityh)});
  }
  return r;
}

inline CriterionResult check_nonlinear_cross_check() {
  CriterionResult c{5, "nonlinear solver vs Picard oracle"};
  Stopwatch sw;
  CrossCheckReport total;
  for (const char* name : {"example3_fixed", "example3", "example5"}) {
    const auto r = nonlinear_cross_check(parse_config(preset_json(name)), {0.0, 1.1, 2.9, 4.4});
    total.difference = std::max(total.difference, r.difference);
    total.max_newton_iterations = std::max(total.max_newton_iterations, r.max_newton_iterations);
  }
  c.seconds = sw.seconds();
  c.passed = total.difference <= 1e-8 && total.max_newton_iterations <= 15;
  c.detail = "max difference " + detail::sci(total.difference) + " (<= 1e-8), Newton iterations " +
             std::to_string(total.max_newton_iterations) + " (<= 15)";
  return c;
}

/// max |psi(rhat; d) - psi(-d; -rhat)| / max |psi| over random pairs.
inline double reciprocity_error(const Boundary& b, double kappa, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, two_pi);
  const CfieSolver K(b, kappa, kappa);
  double err = 0.0, scale = 0.0;
  for (int q = 0; q < pairs; ++q) {
    const Vec2 rhat = unit_vector(u(rng)), d = unit_vector(u(rng));
    const cvec psi_d = K.solve(IncidentWave{kappa, d});
    const cvec psi_r = K.solve(IncidentWave{kappa, -rhat});
    const cplx a = far_field_boundary(b, psi_d, kappa, rhat);
    const cplx c = far_field_boundary(b, psi_r, kappa, -d);
    err = std::max(err, std::abs(a - c));
    scale = std::max({scale, std::abs(a), std::abs(c)});
  }
  return err / scale;
}

inline CriterionResult check_reciprocity() {
  CriterionResult c{6, "far-field reciprocity, five-leaf obstacle"};
  Stopwatch sw;
  const Boundary b({ParametricCurve::five_leaf()}, 600);
  const double e = reciprocity_error(b, 10.0, 16, 99);
  c.seconds = sw.seconds();
  c.passed = e <= 1e-6;
  c.detail = "max rel deviation " + detail::sci(e) + " (<= 1e-6)";
  return c;
}

struct PsfReport {
  double peak_offset = 0.0;  // in grid cells, Chebyshev distance
  double radius = 0.0;       // -3 dB radius
  double bound = 0.0;
};

inline PsfReport born_psf(double kappa = 10.0, int directions = 360, Vec2 r0 = {0.73, -1.21}) {
  const ImageSpec spec{5.0, 256};
  const ImageGrid img = imaging_nufft(born_response(r0, directions, kappa), spec);
  const Peak p = image_peak(img);
  const double h = spec.spacing();
  PsfReport r;
  r.peak_offset = std::max(std::abs(p.position.x - r0.x), std::abs(p.position.y - r0.y)) / h;
  r.radius = half_power_radius(img);
  r.bound = 0.61 * (two_pi / kappa) * 0.5 * 1.2;
  return r;
}

inline CriterionResult check_localization() {
  CriterionResult c{7, "Born point scatterer localization"};
  Stopwatch sw;
  const auto r = born_psf();
  c.seconds = sw.seconds();
  c.passed = r.peak_offset <= 1.0 && r.radius <= r.bound;
  c.detail = "peak offset " + detail::fmt("%.2f cells (<= 1)", r.peak_offset) + ", -3 dB radius " +
             detail::fmt("%.4f", r.radius) + " (<= " + detail::fmt("%.4f)", r.bound);
  return c;
}

// Preset runs are shared between the image-based criteria.
class PresetCache {
 public:
  const ImagingResult& get(const std::string& name) {
    auto it = runs_.find(name);
    if (it == runs_.end())
      it = runs_.emplace(name, run_imaging_experiment(parse_config(preset_json(name)))).first;
    return it->second;
  }

 private:
  std::map<std::string, ImagingResult> runs_;
};

inline const ImageGrid& image_of(const ImagingResult& r, int harmonic) {
  for (const auto& img : r.images)
    if (img.harmonic == harmonic) return img;
  throw UsageError("harmonic " + std::to_string(harmonic) + " was not imaged");
}

// Analysis windows, in units of the base wavelength of the preset.
inline constexpr double ridge_window = 0.5;
inline constexpr int ridge_probes_per_curve = 256;

inline double fwhm_ratio(const ExperimentConfig& cfg, const ImagingResult& r, int harmonic) {
  const double w = ridge_window * two_pi / cfg.kappa;
  const RidgeProbe probe = ridge_probe(cfg.obstacles, ridge_probes_per_curve);
  return mean_ridge_fwhm(image_of(r, harmonic), probe, w) / mean_ridge_fwhm(image_of(r, 1), probe, w);
}

inline CriterionResult check_resolution(PresetCache& cache) {
  CriterionResult c{8, "higher harmonic sharpens the boundary ridge"};
  Stopwatch sw;
  const auto c3 = parse_config(preset_json("example3"));
  const auto c5 = parse_config(preset_json("example5"));
  const double q = fwhm_ratio(c3, cache.get("example3"), 2);
  const double t = fwhm_ratio(c5, cache.get("example5"), 3);
  c.seconds = sw.seconds();
  c.passed = q < 0.8 && t < 0.8;
  c.detail = "FWHM ratio quadratic " + detail::fmt("%.3f", q) + ", cubic " + detail::fmt("%.3f", t) +
             " (< 0.8)";
  return c;
}

inline double harmonic_contrast(const ExperimentConfig& cfg, const ImagingResult& r, int harmonic) {
  const double lambda = two_pi / (harmonic * cfg.kappa);
  const RidgeProbe probe = ridge_probe(cfg.obstacles, ridge_probes_per_curve);
  return ridge_contrast(image_of(r, harmonic), probe, 0.25 * lambda, lambda);
}

inline CriterionResult check_failure_mode(PresetCache& cache) {
  CriterionResult c{9, "fixed scatterers fail to image the obstacle"};
  Stopwatch sw;
  const double fixed =
      harmonic_contrast(parse_config(preset_json("example3_fixed")), cache.get("example3_fixed"), 2);
  const double moving = harmonic_contrast(parse_config(preset_json("example3")), cache.get("example3"), 2);
  c.seconds = sw.seconds();
  c.passed = moving >= 3.0 * fixed;
  c.detail = "harmonic-2 ridge contrast fixed " + detail::fmt("%.3f", fixed) + ", moving " +
             detail::fmt("%.3f", moving) + " (moving >= 3x fixed)";
  return c;
}

inline CriterionResult check_end_to_end(PresetCache& cache) {
  CriterionResult c{10, "examples 1 and 2 end to end"};
  Stopwatch sw;
  try {
    cache.get("example1");
    const auto cfg = parse_config(preset_json("example2"));
    const ImagingResult& r = cache.get("example2");
    const double lambda = two_pi / cfg.kappa;
    const RidgeProbe probe = ridge_probe(cfg.obstacles, ridge_probes_per_curve);
    const double frac = ridge_localized_fraction(image_of(r, 1), probe, 4.0 * lambda, 0.5 * lambda);
    c.passed = frac >= 0.9;
    c.detail = "kappa=50 ridge within lambda/2 on " + detail::fmt("%.1f%%", 100.0 * frac) +
               " of arclength (>= 90%)";
  } catch (const Error& e) {
    c.passed = false;
    c.detail = std::string("solver failure: ") + e.what();
  }
  c.seconds = sw.seconds();
  return c;
}

struct Suite {
  int id;
  const char* name;
  bool fast;
};

inline const std::vector<Suite>& suites() {
  static const std::vector<Suite> s{
      {1, "circle-oracle", true},     {2, "nufft-oracle", true},   {3, "imaging-equivalence", false},
      {4, "reductions", true},        {5, "nonlinear-cross-check", false},
      {6, "reciprocity", true},       {7, "localization", false},  {8, "resolution", false},
      {9, "failure-mode", false},     {10, "end-to-end", false}};
  return s;
}

inline CriterionResult run_criterion(int id, PresetCache& cache) {
  Stopwatch sw;
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = check_circle_oracle(); break;
      case 2: r = check_nufft_oracle(); break;
      case 3: r = check_imaging_equivalence(); break;
      case 4: r = check_reductions(); break;
      case 5: r = check_nonlinear_cross_check(); break;
      case 6: r = check_reciprocity(); break;
      case 7: r = check_localization(); break;
      case 8: r = check_resolution(cache); break;
      case 9: r = check_failure_mode(cache); break;
      case 10: r = check_end_to_end(cache); break;
      default: throw UsageError("unknown criterion " + std::to_string(id));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
    r.seconds = sw.seconds();
  }
  return r;
}

inline std::string format_result(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%s] %2d ", r.passed ? "PASS" : "FAIL", r.id);
  return buf + r.title + ": " + r.detail + detail::fmt(" [%.1f s]", r.seconds);
}

}  // namespace fdi
