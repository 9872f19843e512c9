#pragma once

// Generalized Foldy-Lax systems: point scatterers coupled to sound-soft
// obstacles through the combined-field equation.

#include <memory>
#include <optional>
#include <vector>

#include "fdim/boundary_integral.hpp"
#include "fdim/foldy_lax.hpp"

namespace fdi {

struct SolverOptions {
  std::optional<double> eta;  // coupling parameter, defaults to the harmonic wavenumber
  int quadrature_order = default_quadrature_order;
  TrustRegionOptions newton{};

  double eta_for(double kappa) const { return eta.value_or(kappa); }
};

struct CoupledSolution {
  Nonlinearity kind = Nonlinearity::linear;
  double kappa = 0.0;  // base wavenumber
  ExternalFields fields;
  cvec density1;
  cvec densityh;
  double residual = 0.0;
  int iterations = 0;

  const cvec& density(int harmonic) const {
    return harmonic == 1 ? density1 : densityh;
  }
};

/// Blocks of the coupled system at one wavenumber for a fixed set of positions.
struct GflBlocks {
  cmat Goff;  // m x m
  cmat M;     // m x N, quadrature of int G(r_k, y) . ds
  cmat B;     // N x m, (d_nu - i eta) G(x_q, r_k)
};

inline GflBlocks gfl_blocks(const Boundary& b, const std::vector<Vec2>& pos, double kappa,
                            double eta) {
  return {green_offdiagonal(pos, kappa), boundary_to_point(b, pos, kappa),
          point_to_boundary(b, pos, kappa, eta)};
}

/// Full block matrix [A M; N K] of the linear system, unknowns [phi; psi].
inline cmat assemble_gfl_linear(const Boundary& b, const PointScattererSet& set, double kappa,
                                double eta, int quadrature_order = default_quadrature_order) {
  const int m = set.size(), N = b.size();
  cmat S(m + N, m + N);
  if (m > 0) {
    S.topLeftCorner(m, m) = assemble_foldy_lax_matrix(set.positions, set.linear_sigma(1), kappa);
  }
  if (N > 0) S.bottomRightCorner(N, N) = assemble_cfie(b, kappa, eta, quadrature_order);
  if (m > 0 && N > 0) {
    S.topRightCorner(m, N) = boundary_to_point(b, set.positions, kappa);
    cmat Nb = -point_to_boundary(b, set.positions, kappa, eta);
    for (int k = 0; k < m; ++k) Nb.col(k) *= set.coefficients[k].lin1;
    S.bottomLeftCorner(N, m) = Nb;
  }
  return S;
}

/// Right-hand sides [phi_inc(r_k); (d_nu - i eta) phi_inc(x_q)], one column per wave.
inline cmat gfl_rhs(const Boundary& b, const std::vector<Vec2>& pos,
                    const std::vector<IncidentWave>& waves, double eta) {
  const int m = static_cast<int>(pos.size()), N = b.size();
  cmat R(m + N, static_cast<Eigen::Index>(waves.size()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    const auto& w = waves[j];
    for (int k = 0; k < m; ++k) R(k, j) = w(pos[k]);
    b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
      R(m + idx, j) = w.dnu(P.x[i], P.normal[i]) - I * eta * w(P.x[i]);
    });
  }
  return R;
}

/// Linear coupled system factorized once and reused across incident waves.
class LinearGflSolver {
 public:
  LinearGflSolver(const Boundary& b, const PointScattererSet& set, double kappa,
                  const SolverOptions& opt = {})
      : boundary_(&b), set_(&set), kappa_(kappa), eta_(opt.eta_for(kappa)) {
    if (set.nonlinearity != Nonlinearity::linear)
      throw UsageError("linear coupled solver needs linear point scatterers");
    Stopwatch sw;
    S_ = assemble_gfl_linear(b, set, kappa, eta_, opt.quadrature_order);
    assembly_seconds_ = sw.seconds();
    sw.reset();
    lu_.emplace(S_);
    factor_seconds_ = sw.seconds();
    if (S_.rows() > 0 && !(lu_->rcond() > 1e-14))
      throw ResonanceError("coupled linear system is numerically singular");
  }

  double kappa() const { return kappa_; }
  double eta() const { return eta_; }
  double factor_seconds() const { return factor_seconds_; }
  double assembly_seconds() const { return assembly_seconds_; }

  /// Solution columns [phi; psi] for each wave.
  cmat solve_all(const std::vector<IncidentWave>& waves) const {
    const cmat R = gfl_rhs(*boundary_, set_->positions, waves, eta_);
    if (R.rows() == 0) return R;
    cmat X = lu_->solve(R);
    // Residuals on at most eight evenly spread columns.
    const Eigen::Index stride = std::max<Eigen::Index>(1, X.cols() / 8);
    for (Eigen::Index j = 0; j < X.cols(); j += stride) {
      const double res = inf_norm(S_ * X.col(j) - R.col(j));
      if (res > 1e-10 * (1.0 + inf_norm(X.col(j))))
        throw ResonanceError("coupled linear solve lost accuracy for wave " + std::to_string(j));
    }
    return X;
  }

  CoupledSolution solve(const IncidentWave& wave) const {
    const cmat X = solve_all({wave});
    const int m = set_->size();
    CoupledSolution s;
    s.kind = Nonlinearity::linear;
    s.kappa = kappa_;
    s.fields.kind = Nonlinearity::linear;
    s.fields.first = X.col(0).head(m);
    s.density1 = X.col(0).tail(boundary_->size());
    const cmat R = gfl_rhs(*boundary_, set_->positions, {wave}, eta_);
    if (R.rows() > 0) s.residual = inf_norm(S_ * X.col(0) - R.col(0));
    return s;
  }

 private:
  const Boundary* boundary_;
  const PointScattererSet* set_;
  double kappa_, eta_;
  cmat S_;
  std::optional<Eigen::PartialPivLU<cmat>> lu_;
  double assembly_seconds_ = 0.0, factor_seconds_ = 0.0;
};

/// Schur-complement solver: the CFIE matrices at the base and the higher
/// harmonic are factorized once; each solve reduces to the point-scatterer
/// fields, which works for moving scatterers and nonlinear strength maps.
class SchurGflSolver {
 public:
  SchurGflSolver(const Boundary& b, Nonlinearity kind, double kappa, const SolverOptions& opt = {})
      : boundary_(&b), kind_(kind), kappa_(kappa), opt_(opt) {
    Stopwatch sw;
    if (!b.empty()) {
      cfie1_ = std::make_unique<CfieSolver>(b, kappa, opt.eta_for(kappa), opt.quadrature_order);
      if (kind != Nonlinearity::linear) {
        const double kh = higher_harmonic(kind) * kappa;
        cfieh_ = std::make_unique<CfieSolver>(b, kh, opt.eta_for(kh), opt.quadrature_order);
      }
    }
    factor_seconds_ = sw.seconds();
  }

  double factor_seconds() const { return factor_seconds_; }
  double kappa() const { return kappa_; }
  const CfieSolver* cfie(int harmonic) const {
    return harmonic == 1 ? cfie1_.get() : cfieh_.get();
  }

  /// Solves with the scatterer set as given (positions included).
  CoupledSolution solve(const PointScattererSet& set, const IncidentWave& wave) const {
    if (set.nonlinearity != kind_) throw UsageError("scatterer nonlinearity does not match solver");
    wave.validate();
    const int m = set.size(), N = boundary_->size();
    const int h = higher_harmonic(kind_);
    const double kh = h * kappa_;

    CoupledSolution sol;
    sol.kind = kind_;
    sol.kappa = kappa_;
    sol.fields.kind = kind_;

    cvec rhs_b = N > 0 ? cfie_rhs(*boundary_, wave, cfie1_->eta()) : cvec();
    const cvec phi_inc = incident_at(set.positions, wave);

    // W_j = G_off - M K^{-1} B and the harmonic-1 forcing.
    NonlinearSystem sys;
    sys.set = &set;
    sys.f1 = phi_inc;
    sys.fh = cvec::Zero(m);
    GflBlocks b1, bh;
    cmat KinvB1, KinvBh;
    cvec Kinv_rhs;
    if (m > 0) {
      b1 = N > 0 ? gfl_blocks(*boundary_, set.positions, kappa_, cfie1_->eta())
                 : GflBlocks{green_offdiagonal(set.positions, kappa_), {}, {}};
      sys.W1 = b1.Goff;
      if (N > 0) {
        KinvB1 = cfie1_->solve(b1.B);
        Kinv_rhs = cfie1_->solve(rhs_b);
        sys.W1 -= b1.M * KinvB1;
        sys.f1 -= b1.M * Kinv_rhs;
      }
      if (kind_ != Nonlinearity::linear) {
        bh = N > 0 ? gfl_blocks(*boundary_, set.positions, kh, cfieh_->eta())
                   : GflBlocks{green_offdiagonal(set.positions, kh), {}, {}};
        sys.Wh = bh.Goff;
        if (N > 0) {
          KinvBh = cfieh_->solve(bh.B);
          sys.Wh -= bh.M * KinvBh;
        }
      }
    }

    if (m == 0) {
      sol.fields.first = cvec();
      if (kind_ != Nonlinearity::linear) sol.fields.higher = cvec();
    } else if (kind_ == Nonlinearity::linear) {
      cmat A = -sys.W1;
      for (int k = 0; k < m; ++k) A.col(k) *= set.coefficients[k].lin1;
      A.diagonal().array() += 1.0;
      sol.fields.first = factorize(A, "reduced coupled matrix").solve(sys.f1);
    } else {
      sol.fields = solve_nonlinear(sys, opt_.newton);
      sol.iterations = sol.fields.iterations;
    }

    if (N > 0) {
      if (m > 0) {
        const cvec s1 = source_strengths(set, sol.fields, 1);
        sol.density1 = Kinv_rhs + KinvB1 * s1;
      } else {
        sol.density1 = cfie1_->solve(rhs_b);
      }
      if (kind_ != Nonlinearity::linear) {
        if (m > 0) {
          const cvec sh = source_strengths(set, sol.fields, h);
          sol.densityh = KinvBh * sh;
        } else {
          sol.densityh = cvec::Zero(N);
        }
      }
    }
    sol.residual = residual(set, wave, sol, b1, bh, rhs_b);
    if (sol.residual > 1e-9 * (1.0 + solution_scale(sol)))
      throw ConvergenceError("coupled solution fails the full-system residual check",
                             sol.residual, sol.iterations);
    return sol;
  }

 private:
  static double solution_scale(const CoupledSolution& s) {
    double v = 0.0;
    for (const cvec* c : {&s.fields.first, &s.fields.higher, &s.density1, &s.densityh})
      v = std::max(v, inf_norm(*c));
    return v;
  }

  // Residual of the unreduced equations for every harmonic present.
  double residual(const PointScattererSet& set, const IncidentWave& wave,
                  const CoupledSolution& sol, const GflBlocks& b1, const GflBlocks& bh,
                  const cvec& rhs_b) const {
    const int m = set.size(), N = boundary_->size();
    double r = 0.0;
    auto one = [&](int harmonic, const GflBlocks& bl, const CfieSolver* K, const cvec& phi,
                   const cvec& psi, const cvec& forcing, const cvec& g) {
      const cvec s = m > 0 ? source_strengths(set, sol.fields, harmonic) : cvec();
      if (m > 0) {
        cvec e = phi - bl.Goff * s - forcing;
        if (N > 0) e += bl.M * psi;
        r = std::max(r, inf_norm(e));
      }
      if (N > 0) {
        cvec e = K->matrix() * psi - g;
        if (m > 0) e -= bl.B * s;
        r = std::max(r, inf_norm(e));
      }
    };
    one(1, b1, cfie1_.get(), sol.fields.first, sol.density1, incident_at(set.positions, wave),
        rhs_b);
    if (kind_ != Nonlinearity::linear)
      one(higher_harmonic(kind_), bh, cfieh_.get(), sol.fields.higher, sol.densityh,
          cvec::Zero(m), cvec::Zero(N));
    return r;
  }

  const Boundary* boundary_;
  Nonlinearity kind_;
  double kappa_;
  SolverOptions opt_;
  std::unique_ptr<CfieSolver> cfie1_, cfieh_;
  double factor_seconds_ = 0.0;
};

inline CoupledSolution solve_gfl_linear(const Boundary& b, const PointScattererSet& set,
                                        const IncidentWave& wave, const SolverOptions& opt = {}) {
  return LinearGflSolver(b, set, wave.kappa, opt).solve(wave);
}

inline CoupledSolution solve_gfl_quadratic(const Boundary& b, const PointScattererSet& set,
                                           const IncidentWave& wave,
                                           const SolverOptions& opt = {}) {
  if (set.nonlinearity != Nonlinearity::quadratic)
    throw UsageError("quadratic solve needs a quadratic scatterer set");
  return SchurGflSolver(b, Nonlinearity::quadratic, wave.kappa, opt).solve(set, wave);
}

inline CoupledSolution solve_gfl_cubic(const Boundary& b, const PointScattererSet& set,
                                       const IncidentWave& wave, const SolverOptions& opt = {}) {
  if (set.nonlinearity != Nonlinearity::cubic)
    throw UsageError("cubic solve needs a cubic scatterer set");
  return SchurGflSolver(b, Nonlinearity::cubic, wave.kappa, opt).solve(set, wave);
}

inline CoupledSolution solve_gfl(const Boundary& b, const PointScattererSet& set,
                                 const IncidentWave& wave, const SolverOptions& opt = {}) {
  switch (set.nonlinearity) {
    case Nonlinearity::quadratic: return solve_gfl_quadratic(b, set, wave, opt);
    case Nonlinearity::cubic: return solve_gfl_cubic(b, set, wave, opt);
    default: return solve_gfl_linear(b, set, wave, opt);
  }
}

struct GmresResult {
  cvec x;
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Restarted GMRES without preconditioning, kept as an independent check
/// on the direct solves.
inline GmresResult gmres(const cmat& A, const cvec& b, double tol = 1e-10, int restart = 200,
                         int max_iterations = 2000) {
  const Eigen::Index n = b.size();
  GmresResult out;
  out.x = cvec::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  while (out.iterations < max_iterations) {
    cvec r = b - A * out.x;
    double beta = r.norm();
    out.relative_residual = beta / bnorm;
    if (out.relative_residual <= tol) {
      out.converged = true;
      return out;
    }
    const int kmax = static_cast<int>(std::min<Eigen::Index>(restart, n));
    cmat V(n, kmax + 1);
    cmat H = cmat::Zero(kmax + 1, kmax);
    std::vector<Eigen::JacobiRotation<cplx>> rot(kmax);
    cvec g = cvec::Zero(kmax + 1);
    g[0] = beta;
    V.col(0) = r / beta;
    int k = 0;
    for (; k < kmax && out.iterations < max_iterations; ++k, ++out.iterations) {
      cvec w = A * V.col(k);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V.col(i).dot(w);
        w -= H(i, k) * V.col(i);
      }
      H(k + 1, k) = w.norm();
      if (std::abs(H(k + 1, k)) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) H.col(k).applyOnTheLeft(i, i + 1, rot[i].adjoint());
      rot[k].makeGivens(H(k, k), H(k + 1, k));
      H.col(k).applyOnTheLeft(k, k + 1, rot[k].adjoint());
      g.applyOnTheLeft(k, k + 1, rot[k].adjoint());
      if (std::abs(g[k + 1]) / bnorm <= tol) {
        ++k;
        ++out.iterations;
        break;
      }
    }
    const cvec y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    out.x += V.leftCols(k) * y;
  }
  out.relative_residual = (b - A * out.x).norm() / bnorm;
  out.converged = out.relative_residual <= tol;
  return out;
}

}  // namespace fdi
