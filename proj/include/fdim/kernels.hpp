#pragma once

// Bessel/Hankel functions of orders 0 and 1 for positive real argument and the
// 2D Helmholtz free-space Green's function built on them.

#include <atomic>
#include <cmath>
#include <utility>
#include <vector>

#include "fdim/common.hpp"

namespace fdi {

namespace testing {
/// Relative perturbation applied to every Hankel value. Zero in normal use;
/// the validation harness sets it to check that the oracle suites notice.
inline std::atomic<double> hankel_fault{0.0};
}  // namespace testing

struct BesselPair {
  double j0, j1, y0, y1;
};

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

inline BesselPair bessel_series(double z) {
  const double q = 0.25 * z * z;
  const double log_term = std::log(0.5 * z) + euler_gamma;

  // J0 = sum t_k, Y0 tail = -sum H_k t_k with t_k = (-q)^k / (k!)^2
  double t = 1.0, j0 = 1.0, y0_tail = 0.0, harmonic = 0.0;
  // J1 = (z/2) sum u_k, u_k = (-q)^k / (k! (k+1)!)
  double u = 1.0, j1s = 1.0;
  // psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma
  double y1_tail = 1.0 - 2.0 * euler_gamma;
  for (int k = 1; k < 200; ++k) {
    t *= -q / (double(k) * k);
    u *= -q / (double(k) * (k + 1));
    harmonic += 1.0 / k;
    j0 += t;
    y0_tail -= harmonic * t;
    j1s += u;
    y1_tail += (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * euler_gamma) * u;
    if (std::abs(t) < 1e-18 * std::abs(j0) && std::abs(u) < 1e-18 * std::abs(j1s) &&
        k > 2)
      break;
  }
  const double j1 = 0.5 * z * j1s;
  const double y0 = (2.0 / pi) * (log_term * j0 + y0_tail);
  const double y1 = -2.0 / (pi * z) + (2.0 / pi) * std::log(0.5 * z) * j1 -
                    (0.5 * z / pi) * y1_tail;
  return {j0, j1, y0, y1};
}

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1, with Y0 and Y1
// from the Neumann series in even-order J_n.
inline BesselPair bessel_miller(double z) {
  const int top = 2 * (static_cast<int>(z) / 2) + 48;
  std::vector<double> b(top + 2, 0.0);
  b[top + 1] = 0.0;
  b[top] = 1e-30;
  for (int n = top; n >= 1; --n) {
    b[n - 1] = (2.0 * n / z) * b[n] - b[n + 1];
    if (std::abs(b[n - 1]) > 1e250) {
      for (int m = n - 1; m <= top + 1; ++m) b[m] *= 1e-250;
    }
  }
  double norm = b[0];
  for (int k = 2; k <= top; k += 2) norm += 2.0 * b[k];
  for (double& v : b) v /= norm;

  const double log_term = std::log(0.5 * z) + euler_gamma;
  double y0_sum = 0.0, y1_sum = 0.0;
  for (int k = 1; 2 * k + 1 <= top + 1; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    y0_sum += sign * b[2 * k] / k;
    y1_sum += sign * (b[2 * k - 1] - b[2 * k + 1]) / k;
  }
  const double j0 = b[0], j1 = b[1];
  const double y0 = (2.0 / pi) * log_term * j0 - (4.0 / pi) * y0_sum;
  const double y1 = (2.0 / pi) * (log_term * j1 - j0 / z) + (2.0 / pi) * y1_sum;
  return {j0, j1, y0, y1};
}

// Hankel large-argument expansion, returns (H0, H1).
inline std::pair<cplx, cplx> hankel_asymptotic(double z) {
  auto series = [z](double nu) {
    const double mu = 4.0 * nu * nu;
    cplx sum = 1.0, term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= cplx(0.0, 1.0) * ((mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * z));
      const double mag = std::abs(term);
      if (mag > prev) break;
      sum += term;
      prev = mag;
      if (mag < 1e-17) break;
    }
    return sum;
  };
  const double amp = std::sqrt(2.0 / (pi * z));
  const cplx eiz(std::cos(z), std::sin(z));
  const double r = std::numbers::sqrt2 / 2.0;
  const cplx phase0 = eiz * cplx(r, -r);   // e^{i(z - pi/4)}
  const cplx phase1 = eiz * cplx(-r, -r);  // e^{i(z - 3pi/4)}
  return {amp * phase0 * series(0.0), amp * phase1 * series(1.0)};
}

}  // namespace detail

/// J0, J1, Y0, Y1 at z > 0. Ascending series below 8, Miller recurrence up
/// to 25, large-argument expansion beyond.
inline BesselPair bessel01(double z) {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("Bessel functions require a positive finite argument");
  if (z < 8.0) return detail::bessel_series(z);
  if (z < 25.0) return detail::bessel_miller(z);
  auto [h0, h1] = detail::hankel_asymptotic(z);
  return {h0.real(), h1.real(), h0.imag(), h1.imag()};
}

/// H0^(1)(z) and H1^(1)(z) together.
inline std::pair<cplx, cplx> hankel1_01(double z) {
  std::pair<cplx, cplx> h;
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("Hankel functions require a positive finite argument");
  if (z < 25.0) {
    const BesselPair b = bessel01(z);
    h = {cplx(b.j0, b.y0), cplx(b.j1, b.y1)};
  } else {
    h = detail::hankel_asymptotic(z);
  }
  const double fault = testing::hankel_fault.load(std::memory_order_relaxed);
  if (fault != 0.0) {
    h.first *= 1.0 + fault;
    h.second *= 1.0 + fault;
  }
  return h;
}

inline cplx hankel1_0(double z) { return hankel1_01(z).first; }
inline cplx hankel1_1(double z) { return hankel1_01(z).second; }

/// Points closer than this are treated as coincident by the Green's functions.
inline constexpr double coincidence_threshold = 1e-13;

/// G_k(r, rp) = (i/4) H0^(1)(k |r - rp|).
inline cplx green(double kappa, Vec2 r, Vec2 rp) {
  const double dist = distance(r, rp);
  if (dist < coincidence_threshold)
    throw SingularityError("Green's function evaluated at coincident points");
  return 0.25 * I * hankel1_0(kappa * dist);
}

/// Normal derivative of G with respect to its first argument, nu at r.
inline cplx green_dnu(double kappa, Vec2 r, Vec2 rp, Vec2 nu) {
  const Vec2 diff = r - rp;
  const double dist = norm(diff);
  if (dist < coincidence_threshold)
    throw SingularityError("Green's function derivative at coincident points");
  return -0.25 * I * kappa * hankel1_1(kappa * dist) * (dot(nu, diff) / dist);
}

struct GreenValues {
  cplx value;  // G(r, rp)
  cplx dnu;    // d/dnu_r G(r, rp)
};

/// G and its normal derivative sharing a single Hankel evaluation.
inline GreenValues green_with_dnu(double kappa, Vec2 r, Vec2 rp, Vec2 nu) {
  const Vec2 diff = r - rp;
  const double dist = norm(diff);
  if (dist < coincidence_threshold)
    throw SingularityError("Green's function evaluated at coincident points");
  const auto [h0, h1] = hankel1_01(kappa * dist);
  return {0.25 * I * h0, -0.25 * I * kappa * h1 * (dot(nu, diff) / dist)};
}

/// Limit of d/dnu_r G(r, r') as r' -> r along a C2 curve with signed
/// curvature (positive for a convex boundary with outward normal). The
/// logarithmic part vanishes in the limit, so it does not depend on kappa.
inline double green_dnu_diagonal_limit(double curvature) {
  return -curvature / (4.0 * pi);
}

}  // namespace fdi
