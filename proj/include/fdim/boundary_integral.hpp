#pragma once

// Nystrom discretization of the combined-field equation
//   (1/2) psi + int (d_nu - i eta) G(x, y) psi(y) ds(y) = g
// for the normal derivative psi of the total field on sound-soft obstacles.

#include <vector>

#include "fdim/alpert.hpp"
#include "fdim/kernels.hpp"
#include "fdim/scene.hpp"

namespace fdi {

struct PointSource {
  Vec2 position;
  cplx strength;
};

namespace detail {

inline cplx cfie_kernel(double kappa, double eta, Vec2 x, Vec2 nu, Vec2 y) {
  const auto g = green_with_dnu(kappa, x, y, nu);
  return g.dnu - I * eta * g.value;
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace detail

/// N x N matrix of (1/2) I + (d_nu - i eta) S over every part of `b`.
inline cmat assemble_cfie(const Boundary& b, double kappa, double eta,
                          int quadrature_order = default_quadrature_order) {
  if (!(eta > 0.0)) throw DomainError("coupling parameter must be positive");
  const AlpertRule& rule = alpert_rule(quadrature_order);
  const auto nodes = correction_nodes(rule);
  for (const auto& p : b.parts)
    if (p.n < minimum_nodes(rule))
      throw ConfigError("too few boundary nodes for quadrature order " +
                        std::to_string(quadrature_order));

  const int N = b.size();
  cmat K = cmat::Zero(N, N);
  for (std::size_t pi_ = 0; pi_ < b.parts.size(); ++pi_) {
    const auto& P = b.parts[pi_];
    const int off = b.offsets[pi_], n = P.n;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < n; ++i) {
      const int row = off + i;
      const Vec2 x = P.x[i], nu = P.normal[i];
      for (int k = rule.a; k <= n - rule.a; ++k) {
        const int c = (i + k) % n;
        K(row, off + c) += P.h * P.speed[c] * detail::cfie_kernel(kappa, eta, x, nu, P.x[c]);
      }
      for (const auto& cn : nodes) {
        const auto pt = P.curve.evaluate(P.t[i] + cn.offset * P.h);
        const cplx v =
            P.h * cn.weight * norm(pt.dx) * detail::cfie_kernel(kappa, eta, x, nu, pt.x);
        for (std::size_t m = 0; m < cn.stencil.weights.size(); ++m)
          K(row, off + detail::wrap(i + cn.stencil.first + static_cast<int>(m), n)) +=
              v * cn.stencil.weights[m];
      }
      K(row, row) += 0.5;
      for (std::size_t qj = 0; qj < b.parts.size(); ++qj) {
        if (qj == pi_) continue;
        const auto& Q = b.parts[qj];
        for (int c = 0; c < Q.n; ++c)
          K(row, b.offsets[qj] + c) +=
              Q.h * Q.speed[c] * detail::cfie_kernel(kappa, eta, x, nu, Q.x[c]);
      }
    }
  }
  return K;
}

/// (d_nu - i eta) phi_inc at every node.
inline cvec cfie_rhs(const Boundary& b, const IncidentWave& wave, double eta) {
  cvec g(b.size());
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
    g[idx] = wave.dnu(P.x[i], P.normal[i]) - I * eta * wave(P.x[i]);
  });
  return g;
}

/// Right-hand side for a field radiated by point sources: sum_k s_k (d_nu - i eta) G(x, r_k).
inline cvec cfie_rhs(const Boundary& b, const std::vector<PointSource>& sources, double kappa,
                     double eta) {
  cvec g = cvec::Zero(b.size());
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
    for (const auto& s : sources)
      g[idx] += s.strength * detail::cfie_kernel(kappa, eta, P.x[i], P.normal[i], s.position);
  });
  return g;
}

/// Columns (d_nu - i eta) G_kappa(x_q, r_k).
inline cmat point_to_boundary(const Boundary& b, const std::vector<Vec2>& pos, double kappa,
                              double eta) {
  cmat B(b.size(), static_cast<Eigen::Index>(pos.size()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < B.cols(); ++k)
    b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
      B(idx, k) = detail::cfie_kernel(kappa, eta, P.x[i], P.normal[i], pos[k]);
    });
  return B;
}

/// Rows r_k: trapezoid weights times G_kappa(r_k, y_q).
inline cmat boundary_to_point(const Boundary& b, const std::vector<Vec2>& pos, double kappa) {
  cmat M(static_cast<Eigen::Index>(pos.size()), b.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < M.rows(); ++k)
    b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
      M(k, idx) = P.h * P.speed[i] * green(kappa, pos[k], P.x[i]);
    });
  return M;
}

/// Dense CFIE with its factorization, reusable across right-hand sides.
class CfieSolver {
 public:
  CfieSolver(const Boundary& b, double kappa, double eta,
             int quadrature_order = default_quadrature_order)
      : boundary_(&b), kappa_(kappa), eta_(eta),
        K_(assemble_cfie(b, kappa, eta, quadrature_order)), lu_(K_) {
    if (b.size() > 0 && !(lu_.rcond() > 1e-14))
      throw ResonanceError("combined-field matrix is numerically singular");
  }

  double kappa() const { return kappa_; }
  double eta() const { return eta_; }
  const cmat& matrix() const { return K_; }
  const Eigen::PartialPivLU<cmat>& lu() const { return lu_; }

  template <class Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& g) const {
    return lu_.solve(g);
  }

  cvec solve_checked(const cvec& g) const {
    cvec psi = lu_.solve(g);
    const double res = inf_norm(K_ * psi - g);
    if (res > 1e-12 * (1.0 + inf_norm(psi)))
      throw ResonanceError("combined-field solve lost accuracy");
    return psi;
  }

  cvec solve(const IncidentWave& wave) const {
    return solve_checked(cfie_rhs(*boundary_, wave, eta_));
  }

 private:
  const Boundary* boundary_;
  double kappa_, eta_;
  cmat K_;
  Eigen::PartialPivLU<cmat> lu_;
};

inline cvec solve_cfie(const Boundary& b, double kappa, double eta, const IncidentWave& wave,
                       int quadrature_order = default_quadrature_order) {
  return CfieSolver(b, kappa, eta, quadrature_order).solve(wave);
}

inline cvec solve_cfie(const Boundary& b, double kappa, double eta,
                       const std::vector<PointSource>& sources,
                       int quadrature_order = default_quadrature_order) {
  const CfieSolver s(b, kappa, eta, quadrature_order);
  return s.solve_checked(cfie_rhs(b, sources, kappa, eta));
}

struct FieldValue {
  cplx value;
  bool near_boundary = false;  // closer than two node spacings; accuracy degraded
};

/// -int_Gamma G_kappa(r, y) psi(y) ds(y) at an exterior point.
inline FieldValue scattered_field_bie(const Boundary& b, const cvec& density, double kappa,
                                      Vec2 r) {
  if (b.contains(r)) throw DomainError("evaluation point is inside or on an obstacle");
  FieldValue out{0.0, false};
  const auto [dist, spacing] = b.nearest_node_distance(r);
  out.near_boundary = dist < 2.0 * spacing;
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
    out.value -= P.h * P.speed[i] * green(kappa, r, P.x[i]) * density[idx];
  });
  return out;
}

/// int_Gamma G_kappa(r, y) psi(y) ds(y) at any point off the nodes; inside D
/// it reproduces the incident field for the obstacle-only problem.
inline cplx single_layer(const Boundary& b, const cvec& density, double kappa, Vec2 r) {
  cplx s = 0.0;
  b.for_each_node([&](int idx, const BoundaryDiscretization& P, int i) {
    s += P.h * P.speed[i] * green(kappa, r, P.x[i]) * density[idx];
  });
  return s;
}

}  // namespace fdi
