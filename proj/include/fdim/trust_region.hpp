#pragma once

// Dogleg trust-region Newton iteration for square real systems F(x) = 0.

#include <functional>

#include "fdim/common.hpp"

namespace fdi {

struct TrustRegionOptions {
  double initial_radius = 1.0;
  double residual_tol = 1e-10;  // infinity norm of F
  double step_tol = 1e-12;      // relative to 1 + |x|
  int max_iterations = 50;
};

struct TrustRegionResult {
  rvec x;
  double residual = 0.0;
  int iterations = 0;
};

/// `eval(x, F, J)` fills F(x) and, when J is non-null, the Jacobian.
using ResidualFn = std::function<void(const rvec&, rvec&, rmat*)>;

inline TrustRegionResult trust_region_solve(const ResidualFn& eval, rvec x,
                                            const TrustRegionOptions& opt = {}) {
  const Eigen::Index n = x.size();
  rvec f(n), f_new(n);
  rmat J(n, n);
  eval(x, f, &J);
  double radius = opt.initial_radius;
  double res = f.lpNorm<Eigen::Infinity>();
  int it = 0;
  while (res > opt.residual_tol) {
    if (it >= opt.max_iterations)
      throw ConvergenceError("trust-region Newton did not converge", res, it);
    ++it;

    const rvec g = J.transpose() * f;
    Eigen::PartialPivLU<rmat> lu(J);
    rvec newton = -lu.solve(f);
    if (!newton.allFinite()) newton = -g;

    rvec p;
    if (newton.norm() <= radius) {
      p = newton;
    } else {
      const rvec Jg = J * g;
      const double denom = Jg.squaredNorm();
      const rvec cauchy = denom > 0.0 ? rvec(-(g.squaredNorm() / denom) * g) : rvec(-g);
      if (cauchy.norm() >= radius) {
        p = (radius / cauchy.norm()) * cauchy;
      } else {
        // Walk from the Cauchy point towards the Newton point up to the boundary.
        const rvec dir = newton - cauchy;
        const double a = dir.squaredNorm(), b = 2.0 * cauchy.dot(dir),
                     c = cauchy.squaredNorm() - radius * radius;
        const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
        p = cauchy + tau * dir;
      }
    }

    const double step = p.norm();
    const rvec x_new = x + p;
    eval(x_new, f_new, nullptr);
    const double actual = f.squaredNorm() - f_new.squaredNorm();
    const double predicted = f.squaredNorm() - (f + J * p).squaredNorm();
    const double rho = predicted > 0.0 ? actual / predicted : (actual > 0.0 ? 1.0 : -1.0);

    if (rho < 0.25)
      radius = 0.25 * step;
    else if (rho > 0.75 && step >= 0.99 * radius)
      radius = 2.0 * radius;

    if (rho > 1e-4) {
      x = x_new;
      eval(x, f, &J);
      res = f.lpNorm<Eigen::Infinity>();
    }
    if (step <= opt.step_tol * (1.0 + x.norm()) && res > opt.residual_tol)
      throw ConvergenceError("trust-region Newton stalled", res, it);
  }
  return {std::move(x), res, it};
}

}  // namespace fdi
