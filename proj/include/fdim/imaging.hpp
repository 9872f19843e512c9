#pragma once

// Direct imaging I(r) = u(r)^T P v(r) on a uniform grid over [-L, L]^2,
// by dense products (reference) or by a 2D type-1 NUFFT.

#include <cmath>
#include <string>

#include "fdim/farfield.hpp"
#include "fdim/nufft.hpp"

namespace fdi {

struct ImageSpec {
  double half_width = 5.0;  // L
  int samples = 64;         // N_s per axis

  double spacing() const { return 2.0 * half_width / samples; }
  /// Coordinate of sample n: -L + (2L/N_s) n.
  double coord(int n) const { return -half_width + spacing() * n; }

  /// Smallest admissible even N_s for the NUFFT path at wavenumber kappa.
  static int minimal_samples(double kappa, double half_width) {
    int n = static_cast<int>(std::ceil(4.0 * kappa * half_width / pi - 1e-9));
    return n + (n % 2);
  }
};

struct ImageGrid {
  ImageSpec spec;
  double kappa = 0.0;
  int harmonic = 1;
  cmat values;  // values(ix, iy) at (coord(ix), coord(iy))

  rmat magnitude() const { return values.cwiseAbs(); }
};

namespace detail {

inline cmat phases(const std::vector<double>& proj, double kappa, const ImageSpec& s) {
  // E(k, n) = e^{i kappa coord(n) proj_k}
  cmat E(static_cast<Eigen::Index>(proj.size()), s.samples);
  for (int n = 0; n < s.samples; ++n)
    for (std::size_t k = 0; k < proj.size(); ++k) {
      const double ph = kappa * s.coord(n) * proj[k];
      E(static_cast<Eigen::Index>(k), n) = cplx(std::cos(ph), std::sin(ph));
    }
  return E;
}

inline void check_dims(const ResponseMatrix& R) {
  if (R.P.rows() != R.grid.M || R.P.cols() != R.grid.N)
    throw UsageError("response matrix dimensions do not match its direction grid");
}

}  // namespace detail

/// Reference evaluation. Row by row in y, P is scaled by the y phases and
/// multiplied against the x phases of all columns of the grid at once.
inline ImageGrid imaging_direct(const ResponseMatrix& R, const ImageSpec& s) {
  detail::check_dims(R);
  if (s.samples < 1 || !(s.half_width > 0.0)) throw ConfigError("invalid image grid");
  const int M = R.grid.M, N = R.grid.N;
  const double k = R.kappa;
  std::vector<double> ca(M), sa(M), cb(N), sb(N);
  for (int i = 0; i < M; ++i) ca[i] = std::cos(R.grid.alpha(i)), sa[i] = std::sin(R.grid.alpha(i));
  for (int j = 0; j < N; ++j) cb[j] = std::cos(R.grid.beta(j)), sb[j] = std::sin(R.grid.beta(j));
  const cmat Ux = detail::phases(ca, k, s), Uy = detail::phases(sa, k, s);
  const cmat Vx = detail::phases(cb, k, s), Vy = detail::phases(sb, k, s);
  const double norm = 1.0 / std::sqrt(double(M) * N);

  ImageGrid img{s, k, R.harmonic, cmat(s.samples, s.samples)};
#pragma omp parallel for schedule(dynamic)
  for (int iy = 0; iy < s.samples; ++iy) {
    const cmat Py = Uy.col(iy).asDiagonal() * R.P * Vy.col(iy).asDiagonal();
    const cmat T = Py * Vx;  // M x N_s: (P v)(x_n, y) per column n
    for (int ix = 0; ix < s.samples; ++ix)
      img.values(ix, iy) = norm * (Ux.col(ix).array() * T.col(ix).array()).sum();
  }
  return img;
}

/// Single-point evaluation of u^T P v, for spot checks.
inline cplx imaging_at(const ResponseMatrix& R, Vec2 r) {
  const int M = R.grid.M, N = R.grid.N;
  cvec u(M), v(N);
  for (int i = 0; i < M; ++i) u[i] = std::exp(I * R.kappa * dot(r, R.grid.observation(i)));
  for (int j = 0; j < N; ++j) v[j] = std::exp(I * R.kappa * dot(r, R.grid.incidence(j)));
  return (u.transpose() * R.P * v)(0, 0) / std::sqrt(double(M) * N);
}

/// Fast path: each entry P_ij is a source at frequency
/// kappa (cos a_i + cos b_j, sin a_i + sin b_j) scaled by the grid spacing.
inline ImageGrid imaging_nufft(const ResponseMatrix& R, const ImageSpec& s) {
  detail::check_dims(R);
  if (s.samples < 2 || s.samples % 2 != 0 || !(s.half_width > 0.0))
    throw ConfigError("NUFFT imaging needs an even sample count and positive half width");
  const double k = R.kappa, h = s.spacing();
  if (2.0 * k * h > pi * (1.0 + 1e-12)) {
    throw ConfigError("image grid too coarse for wavenumber " + std::to_string(k) +
                      ": need samples >= " +
                      std::to_string(ImageSpec::minimal_samples(k, s.half_width)));
  }
  const int M = R.grid.M, N = R.grid.N;
  const Eigen::Index n = Eigen::Index(M) * N;
  rvec xi(n), eta(n);
  cvec c(n);
  const double norm = 1.0 / std::sqrt(double(M) * N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < M; ++i) {
      const Eigen::Index q = Eigen::Index(j) * M + i;
      xi[q] = std::clamp(k * h * (std::cos(R.grid.alpha(i)) + std::cos(R.grid.beta(j))), -pi, pi);
      eta[q] = std::clamp(k * h * (std::sin(R.grid.alpha(i)) + std::sin(R.grid.beta(j))), -pi, pi);
      c[q] = norm * R.P(i, j);
    }
  // Sample n sits at x = h (n - N_s/2), exactly the NUFFT target index.
  ImageGrid img{s, k, R.harmonic, nufft2d_type1(xi, eta, c, s.samples)};
  return img;
}

}  // namespace fdi
