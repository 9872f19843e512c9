#pragma once

#include <vector>

#include "fdim/kernels.hpp"
#include "fdim/scene.hpp"
#include "fdim/trust_region.hpp"

namespace fdi {

/// Fields acting on the point scatterers. `higher` is empty for linear sets.
struct ExternalFields {
  Nonlinearity kind = Nonlinearity::linear;
  cvec first;
  cvec higher;
  int iterations = 0;  // Newton iterations, zero for linear solves

  int higher_order() const { return higher_harmonic(kind); }
  const cvec& at(int harmonic) const {
    if (harmonic == 1) return first;
    if (kind != Nonlinearity::linear && harmonic == higher_order()) return higher;
    throw UsageError("harmonic " + std::to_string(harmonic) + " not present in the solution");
  }
};

/// G_off[i][k] = G_kappa(r_i, r_k) for i != k, zero on the diagonal.
inline cmat green_offdiagonal(const std::vector<Vec2>& pos, double kappa) {
  const Eigen::Index m = static_cast<Eigen::Index>(pos.size());
  cmat G = cmat::Zero(m, m);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = i + 1; k < m; ++k) {
      const cplx g = green(kappa, pos[i], pos[k]);
      G(i, k) = g;
      G(k, i) = g;
    }
  return G;
}

/// A[i][i] = 1, A[i][k] = -sigma_k G_kappa(r_i, r_k).
inline cmat assemble_foldy_lax_matrix(const std::vector<Vec2>& pos,
                                      const std::vector<double>& sigma, double kappa) {
  cmat A = -green_offdiagonal(pos, kappa);
  for (Eigen::Index k = 0; k < A.cols(); ++k) A.col(k) *= sigma[k];
  A.diagonal().setOnes();
  return A;
}

inline cmat assemble_foldy_lax_matrix(const PointScattererSet& set, double kappa) {
  return assemble_foldy_lax_matrix(set.positions, set.linear_sigma(1), kappa);
}

inline cvec incident_at(const std::vector<Vec2>& pos, const IncidentWave& wave) {
  cvec v(static_cast<Eigen::Index>(pos.size()));
  for (std::size_t k = 0; k < pos.size(); ++k) v[k] = wave(pos[k]);
  return v;
}

/// LU of a dense system with a conditioning check.
inline Eigen::PartialPivLU<cmat> factorize(const cmat& A, const char* what) {
  Eigen::PartialPivLU<cmat> lu(A);
  if (A.rows() > 0 && !(lu.rcond() > 1e-14))
    throw ResonanceError(std::string(what) + " is numerically singular");
  return lu;
}

/// Source strength of every scatterer at the given harmonic.
inline cvec source_strengths(const PointScattererSet& set, const cvec& phi1, const cvec& phih,
                             int harmonic) {
  const Eigen::Index m = set.size();
  cvec s(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& c = set.coefficients[k];
    const cplx p1 = phi1[k];
    switch (set.nonlinearity) {
      case Nonlinearity::linear:
        s[k] = c.lin1 * p1;
        break;
      case Nonlinearity::quadratic:
        s[k] = harmonic == 1 ? c.lin1 * p1 + c.nl1 * std::conj(p1) * phih[k]
                             : c.lin2 * phih[k] + c.nl2 * p1 * p1;
        break;
      case Nonlinearity::cubic:
        s[k] = harmonic == 1 ? c.lin1 * p1 + c.nl1 * std::norm(p1) * p1 +
                                   c.nl2 * std::conj(p1) * std::conj(p1) * phih[k]
                             : c.lin2 * phih[k] + c.nl3 * p1 * p1 * p1;
        break;
    }
  }
  return s;
}

inline cvec source_strengths(const PointScattererSet& set, const ExternalFields& f,
                             int harmonic) {
  return source_strengths(set, f.first, f.higher, harmonic);
}

/// Reduced nonlinear system for the two harmonics:
///   phi1 = f1 + W1 s1(phi),  phih = fh + Wh sh(phi).
/// Point-scatterer-only problems use W = G_off; coupled problems subtract
/// the obstacle's response.
struct NonlinearSystem {
  const PointScattererSet* set = nullptr;
  cmat W1, Wh;
  cvec f1, fh;

  cvec residual(const cvec& phi1, const cvec& phih) const {
    const Eigen::Index m = phi1.size();
    cvec r(2 * m);
    r.head(m) = phi1 - W1 * source_strengths(*set, phi1, phih, 1) - f1;
    r.tail(m) = phih - Wh * source_strengths(*set, phi1, phih, 2) - fh;
    return r;
  }
};

namespace detail {

// d s / d phi and d s / d conj(phi) for one scatterer; index 0 = phi1, 1 = phih.
struct LocalDerivatives {
  cplx ds1_dz[2], ds1_dzbar[2], dsh_dz[2], dsh_dzbar[2];
};

inline LocalDerivatives local_derivatives(Nonlinearity kind, const ScattererCoefficients& c,
                                          cplx p1, cplx ph) {
  LocalDerivatives d{};
  if (kind == Nonlinearity::quadratic) {
    d.ds1_dz[0] = c.lin1;
    d.ds1_dzbar[0] = c.nl1 * ph;
    d.ds1_dz[1] = c.nl1 * std::conj(p1);
    d.dsh_dz[0] = 2.0 * c.nl2 * p1;
    d.dsh_dz[1] = c.lin2;
  } else {
    const cplx pb = std::conj(p1);
    d.ds1_dz[0] = c.lin1 + 2.0 * c.nl1 * p1 * pb;
    d.ds1_dzbar[0] = c.nl1 * p1 * p1 + 2.0 * c.nl2 * pb * ph;
    d.ds1_dz[1] = c.nl2 * pb * pb;
    d.dsh_dz[0] = 3.0 * c.nl3 * p1 * p1;
    d.dsh_dz[1] = c.lin2;
  }
  return d;
}

}  // namespace detail

/// Solves a NonlinearSystem by trust-region Newton on the real and
/// imaginary parts, starting from the solution with the nonlinear
/// coefficients zeroed.
inline ExternalFields solve_nonlinear(const NonlinearSystem& sys,
                                      const TrustRegionOptions& opt = {}) {
  const PointScattererSet& set = *sys.set;
  const Eigen::Index m = set.size();
  ExternalFields out;
  out.kind = set.nonlinearity;
  if (m == 0) return out;

  // Linear start: harmonic equations decouple once nl* = 0.
  cmat A1 = -sys.W1, Ah = -sys.Wh;
  for (Eigen::Index k = 0; k < m; ++k) {
    A1.col(k) *= set.coefficients[k].lin1;
    Ah.col(k) *= set.coefficients[k].lin2;
  }
  A1.diagonal().array() += 1.0;
  Ah.diagonal().array() += 1.0;
  const cvec start1 = factorize(A1, "Foldy-Lax matrix").solve(sys.f1);
  const cvec starth = factorize(Ah, "Foldy-Lax matrix").solve(sys.fh);

  const Eigen::Index n = 2 * m;
  auto unpack = [m](const rvec& x, cvec& p1, cvec& ph) {
    p1.resize(m);
    ph.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      p1[k] = cplx(x[k], x[2 * m + k]);
      ph[k] = cplx(x[m + k], x[3 * m + k]);
    }
  };

  auto eval = [&](const rvec& x, rvec& F, rmat* J) {
    cvec p1, ph;
    unpack(x, p1, ph);
    const cvec r = sys.residual(p1, ph);
    F.resize(2 * n);
    F.head(n) = r.real();
    F.tail(n) = r.imag();
    if (!J) return;
    // dR/dz = I - W Ds, dR/dzbar = -W Dsbar with W = diag(W1, Wh).
    cmat A = cmat::Identity(n, n), B = cmat::Zero(n, n);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto d = detail::local_derivatives(set.nonlinearity, set.coefficients[k], p1[k], ph[k]);
      for (int v = 0; v < 2; ++v) {
        const Eigen::Index col = v * m + k;
        A.col(col).head(m) -= sys.W1.col(k) * d.ds1_dz[v];
        A.col(col).tail(m) -= sys.Wh.col(k) * d.dsh_dz[v];
        B.col(col).head(m) -= sys.W1.col(k) * d.ds1_dzbar[v];
        B.col(col).tail(m) -= sys.Wh.col(k) * d.dsh_dzbar[v];
      }
    }
    J->resize(2 * n, 2 * n);
    J->topLeftCorner(n, n) = (A + B).real();
    J->topRightCorner(n, n) = -(A - B).imag();
    J->bottomLeftCorner(n, n) = (A + B).imag();
    J->bottomRightCorner(n, n) = (A - B).real();
  };

  rvec x0(2 * n);
  x0 << start1.real(), starth.real(), start1.imag(), starth.imag();
  const auto res = trust_region_solve(eval, x0, opt);
  unpack(res.x, out.first, out.higher);
  out.iterations = res.iterations;
  return out;
}

inline ExternalFields solve_linear_fl(const PointScattererSet& set, const IncidentWave& wave) {
  wave.validate();
  ExternalFields out;
  out.kind = Nonlinearity::linear;
  if (set.size() == 0) return out;
  const cmat A = assemble_foldy_lax_matrix(set.positions, set.linear_sigma(1), wave.kappa);
  const cvec rhs = incident_at(set.positions, wave);
  out.first = factorize(A, "Foldy-Lax matrix").solve(rhs);
  const double res = inf_norm(A * out.first - rhs);
  if (res > 1e-12 * (1.0 + inf_norm(out.first)))
    throw ResonanceError("Foldy-Lax solve lost accuracy");
  return out;
}

inline NonlinearSystem foldy_lax_system(const PointScattererSet& set, const IncidentWave& wave) {
  const int h = higher_harmonic(set.nonlinearity);
  NonlinearSystem sys;
  sys.set = &set;
  sys.W1 = green_offdiagonal(set.positions, wave.kappa);
  sys.Wh = green_offdiagonal(set.positions, h * wave.kappa);
  sys.f1 = incident_at(set.positions, wave);
  sys.fh = cvec::Zero(set.size());
  return sys;
}

inline ExternalFields solve_quadratic_fl(const PointScattererSet& set, const IncidentWave& wave,
                                         const TrustRegionOptions& opt = {}) {
  if (set.nonlinearity != Nonlinearity::quadratic)
    throw UsageError("quadratic solve needs a quadratic scatterer set");
  wave.validate();
  return solve_nonlinear(foldy_lax_system(set, wave), opt);
}

inline ExternalFields solve_cubic_fl(const PointScattererSet& set, const IncidentWave& wave,
                                     const TrustRegionOptions& opt = {}) {
  if (set.nonlinearity != Nonlinearity::cubic)
    throw UsageError("cubic solve needs a cubic scatterer set");
  wave.validate();
  return solve_nonlinear(foldy_lax_system(set, wave), opt);
}

inline ExternalFields solve_fl(const PointScattererSet& set, const IncidentWave& wave,
                               const TrustRegionOptions& opt = {}) {
  switch (set.nonlinearity) {
    case Nonlinearity::quadratic: return solve_quadratic_fl(set, wave, opt);
    case Nonlinearity::cubic: return solve_cubic_fl(set, wave, opt);
    default: return solve_linear_fl(set, wave);
  }
}

/// Scattered field of the point scatterers at harmonic j, base wavenumber kappa.
inline cplx scattered_field_fl(const PointScattererSet& set, const ExternalFields& fields,
                               Vec2 r, int harmonic, double kappa) {
  if (set.size() == 0) return 0.0;
  const cvec s = source_strengths(set, fields.first,
                                  fields.higher.size() ? fields.higher
                                                       : cvec(cvec::Zero(set.size())),
                                  harmonic);
  cplx sum = 0.0;
  for (int k = 0; k < set.size(); ++k) sum += s[k] * green(harmonic * kappa, r, set.positions[k]);
  return sum;
}

}  // namespace fdi
