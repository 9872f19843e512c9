#pragma once

#include <exception>
#include <mutex>
#include <optional>
#include <vector>

#include "fdim/coupled.hpp"

namespace fdi {

/// gamma = e^{i pi/4} / sqrt(8 pi kappa).
inline cplx far_field_constant(double kappa) {
  return std::exp(I * (pi / 4.0)) / std::sqrt(8.0 * pi * kappa);
}

/// Uniform observation angles alpha_i = 2 pi i / M and incidence angles
/// beta_j = 2 pi j / N.
struct DirectionGrid {
  int M = 1;
  int N = 1;

  double alpha(int i) const { return two_pi * i / M; }
  double beta(int j) const { return two_pi * j / N; }
  Vec2 observation(int i) const { return unit_vector(alpha(i)); }
  Vec2 incidence(int j) const { return unit_vector(beta(j)); }
  void validate() const {
    if (M < 1 || N < 1) throw ConfigError("direction counts must be positive");
  }
};

enum class Modality { plain, gfl_minus_fl };

struct ResponseMatrix {
  cmat P;
  double kappa = 0.0;  // wavenumber of the recorded harmonic
  int harmonic = 1;
  DirectionGrid grid;
};

/// E(i, k) = exp(-i kappa rhat_i . r_k).
inline cmat phase_matrix(const std::vector<Vec2>& rhat, const std::vector<Vec2>& pts,
                         double kappa) {
  cmat E(static_cast<Eigen::Index>(rhat.size()), static_cast<Eigen::Index>(pts.size()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < E.cols(); ++k)
    for (Eigen::Index i = 0; i < E.rows(); ++i) {
      const double ph = -kappa * dot(rhat[i], pts[k]);
      E(i, k) = cplx(std::cos(ph), std::sin(ph));
    }
  return E;
}

inline std::vector<Vec2> boundary_nodes(const Boundary& b) {
  std::vector<Vec2> x(b.size());
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) { x[idx] = P.x[i]; });
  return x;
}

inline rvec boundary_weights(const Boundary& b) {
  rvec w(b.size());
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) { w[idx] = P.h * P.speed[i]; });
  return w;
}

/// Far-field operator for one wavenumber: maps point strengths S (m x n) and
/// boundary densities Psi (N x n) to far-field samples at the observation
/// directions: gamma (E_p S - E_b W Psi).
class FarFieldOperator {
 public:
  FarFieldOperator(const std::vector<Vec2>& rhat, const std::vector<Vec2>& points,
                   const Boundary& b, double kappa)
      : gamma_(far_field_constant(kappa)) {
    Ep_ = phase_matrix(rhat, points, kappa);
    if (!b.empty()) {
      Eb_ = phase_matrix(rhat, boundary_nodes(b), kappa);
      Eb_ = Eb_ * boundary_weights(b).cast<cplx>().asDiagonal();
    }
  }

  cmat apply(const cmat& S, const cmat& Psi) const {
    cmat F = cmat::Zero(Ep_.rows(), std::max(S.cols(), Psi.cols()));
    if (Ep_.cols() > 0 && S.size() > 0) F.noalias() += Ep_ * S;
    if (Eb_.cols() > 0 && Psi.size() > 0) F.noalias() -= Eb_ * Psi;
    return gamma_ * F;
  }

 private:
  cplx gamma_;
  cmat Ep_, Eb_;
};

/// Far field of point sources with the given strengths at wavenumber kappa.
inline cplx far_field_points(const std::vector<Vec2>& pos, const cvec& strengths, double kappa,
                             Vec2 rhat) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k)
    s += strengths[k] * std::exp(-I * kappa * dot(rhat, pos[k]));
  return far_field_constant(kappa) * s;
}

/// Boundary contribution -gamma int psi e^{-i kappa rhat.y} ds.
inline cplx far_field_boundary(const Boundary& b, const cvec& density, double kappa, Vec2 rhat) {
  cplx s = 0.0;
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
    s += P.h * P.speed[i] * density[idx] * std::exp(-I * kappa * dot(rhat, P.x[i]));
  });
  return -far_field_constant(kappa) * s;
}

inline void check_unit(Vec2 rhat) {
  if (std::abs(norm(rhat) - 1.0) > 1e-12) throw DomainError("observation direction must be a unit vector");
}

/// Point-scatterer-only far field at harmonic j (base wavenumber kappa).
inline cplx far_field(const PointScattererSet& set, const ExternalFields& f, Vec2 rhat,
                      int harmonic, double kappa) {
  check_unit(rhat);
  if (f.kind != set.nonlinearity) throw UsageError("solution does not match the scatterer set");
  if (set.size() == 0) return 0.0;
  if (f.first.size() != set.size()) throw UsageError("solution does not match the scatterer set");
  f.at(harmonic);
  return far_field_points(set.positions, source_strengths(set, f, harmonic), harmonic * kappa,
                          rhat);
}

/// Far field of a coupled solution at harmonic j.
inline cplx far_field(const Boundary& b, const PointScattererSet& set, const CoupledSolution& s,
                      Vec2 rhat, int harmonic) {
  check_unit(rhat);
  if (s.kind != set.nonlinearity) throw UsageError("solution does not match the scatterer set");
  if (harmonic != 1 && (s.kind == Nonlinearity::linear || harmonic != higher_harmonic(s.kind)))
    throw UsageError("harmonic not present in the solution");
  if (s.density(harmonic).size() != b.size())
    throw UsageError("solution does not match the boundary");
  const double kj = harmonic * s.kappa;
  cplx v = far_field_boundary(b, s.density(harmonic), kj, rhat);
  if (set.size() > 0) v += far_field_points(set.positions, source_strengths(set, s.fields, harmonic), kj, rhat);
  return v;
}

/// How the response matrix is measured.
struct ResponseSpec {
  std::vector<int> harmonics{1};
  Modality higher_modality = Modality::plain;  // used for harmonics above the first
  std::optional<std::vector<double>> aligned_radii;  // scatterers move with the incidence
  double amplitude = 1.0;
};

struct ForwardTimings {
  double invert = 0.0;  // factorization
  double solver = 0.0;  // per incidence, averaged
  double ffp = 0.0;     // far-field evaluation, all harmonics
};

/// Incident wave of column j: a plane wave arriving from direction d_j, so
/// it propagates along -d_j. With this convention the illumination vector
/// v_j = e^{i kappa r.d_j} steers to the scatterer rather than its mirror.
inline IncidentWave column_wave(const DirectionGrid& g, int j, double kappa, double amplitude) {
  return {kappa, -g.incidence(j), amplitude};
}

namespace detail {

struct ColumnError {
  std::mutex mu;
  std::exception_ptr first;
  int index = -1;

  void record(int j) {
    std::lock_guard lock(mu);
    if (!first || j < index) {
      first = std::current_exception();
      index = j;
    }
  }
  void rethrow() const {
    if (!first) return;
    try {
      std::rethrow_exception(first);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("incidence " + std::to_string(index) + ": " + e.what(),
                             e.last_residual, e.iterations);
    } catch (const ResonanceError& e) {
      throw ResonanceError("incidence " + std::to_string(index) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("incidence " + std::to_string(index) + ": " + e.what());
    }
  }
};

}  // namespace detail

/// Multistatic response matrices for the requested harmonics of one scene.
inline std::vector<ResponseMatrix> build_response_matrices(
    const Scene& scene, const Boundary& b, const DirectionGrid& grid, double kappa,
    const ResponseSpec& spec, const SolverOptions& opt = {}, ForwardTimings* timings = nullptr) {
  grid.validate();
  scene.validate();
  const PointScattererSet& set = scene.scatterers;
  const Nonlinearity kind = set.nonlinearity;
  for (int h : spec.harmonics) {
    if (h != 1 && (kind == Nonlinearity::linear || h != higher_harmonic(kind)))
      throw UsageError("harmonic " + std::to_string(h) + " is not generated by this scene");
    if (h != 1 && spec.higher_modality == Modality::gfl_minus_fl && kind == Nonlinearity::linear)
      throw UsageError("differencing needs nonlinear point scatterers");
  }
  if (spec.aligned_radii && spec.aligned_radii->size() != static_cast<std::size_t>(set.size()))
    throw ConfigError("one aligned radius per point scatterer is required");

  std::vector<Vec2> rhat(grid.M);
  for (int i = 0; i < grid.M; ++i) rhat[i] = grid.observation(i);

  std::vector<ResponseMatrix> out;
  for (int h : spec.harmonics)
    out.push_back({cmat::Zero(grid.M, grid.N), h * kappa, h, grid});
  ForwardTimings t;

  const bool fixed_linear = kind == Nonlinearity::linear && !spec.aligned_radii;
  if (fixed_linear) {
    std::vector<IncidentWave> waves;
    for (int j = 0; j < grid.N; ++j) waves.push_back(column_wave(grid, j, kappa, spec.amplitude));
    const LinearGflSolver solver(b, set, kappa, opt);
    t.invert = solver.factor_seconds();
    Stopwatch sw;
    const cmat X = solver.solve_all(waves);
    t.solver = sw.seconds() / grid.N;
    sw.reset();
    const int m = set.size();
    cmat S = X.topRows(m);
    for (int k = 0; k < m; ++k) S.row(k) *= set.coefficients[k].lin1;
    const FarFieldOperator ff(rhat, set.positions, b, kappa);
    out[0].P = ff.apply(S, X.bottomRows(b.size()));
    t.ffp = sw.seconds();
    if (timings) *timings = t;
    return out;
  }

  // Per-column path: Schur reduction over factorized CFIE matrices. Boundary
  // densities are gathered and mapped to the far field with one product per
  // harmonic; point terms depend on the column's positions.
  const SchurGflSolver solver(b, kind, kappa, opt);
  t.invert = solver.factor_seconds();
  const std::size_t H = spec.harmonics.size();
  std::vector<cmat> densities(H, cmat(b.size(), grid.N));
  detail::ColumnError err;
  double solve_time = 0.0, ff_time = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(+ : solve_time, ff_time)
  for (int j = 0; j < grid.N; ++j) {
    try {
      Stopwatch sw;
      const IncidentWave wave = column_wave(grid, j, kappa, spec.amplitude);
      const PointScattererSet cset =
          spec.aligned_radii
              ? set.with_positions(place_aligned_point_scatterers(*spec.aligned_radii, grid.beta(j)))
              : set;
      const CoupledSolution sol = solver.solve(cset, wave);
      std::optional<ExternalFields> fl;
      for (std::size_t q = 0; q < H; ++q)
        if (spec.harmonics[q] != 1 && spec.higher_modality == Modality::gfl_minus_fl && !fl)
          fl = solve_fl(cset, wave, opt.newton);
      solve_time += sw.seconds();
      sw.reset();
      for (std::size_t q = 0; q < H; ++q) {
        const int h = spec.harmonics[q];
        if (b.size() > 0) densities[q].col(j) = sol.density(h);
        if (cset.size() == 0) continue;
        cvec s = source_strengths(cset, sol.fields, h);
        if (fl && h != 1) s -= source_strengths(cset, *fl, h);
        const cplx gamma = far_field_constant(h * kappa);
        for (int i = 0; i < grid.M; ++i) {
          cplx pts = 0.0;
          for (int k = 0; k < cset.size(); ++k)
            pts += s[k] * std::exp(-I * (h * kappa) * dot(rhat[i], cset.positions[k]));
          out[q].P(i, j) = gamma * pts;
        }
      }
      ff_time += sw.seconds();
    } catch (...) {
      err.record(j);
    }
  }
  err.rethrow();
  if (b.size() > 0) {
    Stopwatch sw;
    for (std::size_t q = 0; q < H; ++q) {
      const FarFieldOperator ff(rhat, {}, b, spec.harmonics[q] * kappa);
      out[q].P += ff.apply(cmat(), densities[q]);
    }
    ff_time += sw.seconds();
  }
  t.solver = solve_time / grid.N;
  t.ffp = ff_time;
  if (timings) *timings = t;
  return out;
}

inline ResponseMatrix build_response_matrix(const Scene& scene, const Boundary& b,
                                            const DirectionGrid& grid, double kappa, int harmonic,
                                            Modality modality, const SolverOptions& opt = {},
                                            std::optional<std::vector<double>> aligned_radii = {}) {
  ResponseSpec spec;
  spec.harmonics = {harmonic};
  if (harmonic == 1 && modality == Modality::gfl_minus_fl)
    throw UsageError("differencing applies to the higher harmonic only");
  spec.higher_modality = modality;
  spec.aligned_radii = std::move(aligned_radii);
  return build_response_matrices(scene, b, grid, kappa, spec, opt).front();
}

}  // namespace fdi
