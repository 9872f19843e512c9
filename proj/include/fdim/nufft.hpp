#pragma once

// Type-1 non-uniform FFT by Gaussian gridding:
//   f(x) = sum_j c_j e^{i xi_j x},  xi_j in [-pi, pi],  x = -m/2 .. m/2 - 1.
// Sources are spread onto a 2m-point periodic grid with a truncated
// Gaussian, transformed with FFTW and deconvolved.

#include <algorithm>
#include <array>
#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "fdim/common.hpp"

namespace fdi {

struct NufftPlan {
  int m = 0;         // targets per dimension
  int Mr = 0;        // oversampled grid, 2m
  double tau = 0.0;  // Gaussian e^{-xi^2 / (4 tau)}
  int Msp = 12;      // spreading half-width in grid points

  static NufftPlan make(int m) {
    if (m < 2 || m % 2 != 0) throw DomainError("NUFFT target count must be even and at least 2");
    return {m, 2 * m, 12.0 / (double(m) * m), 12};
  }
  double spacing() const { return two_pi / Mr; }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// In-place backward (e^{+i...}) transform of a 1D or square 2D grid.
inline void fftw_backward(cplx* data, int n, int dims) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = dims == 1 ? fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE)
                     : fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

// In-place backward transform of an n x n block whose columns are ld apart.
inline void fftw_backward_strided(cplx* data, int n, int ld) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  const fftw_iodim dims[2] = {{n, ld, ld}, {n, 1, 1}};
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_guru_dft(2, dims, 0, nullptr, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw Error("FFTW planning failed");
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

// Truncated Gaussian weights of one source on the oversampled grid. first
// is the grid index (possibly negative) of weights[0].
struct SpreadWeights {
  int first;
  std::array<double, 24> w;
};

class Spreader {
 public:
  explicit Spreader(const NufftPlan& p) : p_(p), h_(p.spacing()) {
    for (int k = 0; k <= p.Msp; ++k) table_[k] = std::exp(-(k * h_) * (k * h_) / (4.0 * p.tau));
  }

  SpreadWeights weights(double xi) const {
    const double s = (xi + pi) / h_;  // grid coordinate with 0 at -pi
    const int l0 = static_cast<int>(std::floor(s));
    const double d = (s - l0) * h_;  // in [0, h)
    SpreadWeights out;
    out.first = l0 - p_.Msp + 1;
    // e^{-(k h - d)^2/(4 tau)} = e^{-d^2/4tau} e^{k h d/(2 tau)} e^{-k^2 h^2/4tau}
    const double e0 = std::exp(-d * d / (4.0 * p_.tau));
    const double e1 = std::exp(h_ * d / (2.0 * p_.tau));
    double up = e0, down = e0 / e1;
    for (int k = 0; k <= p_.Msp; ++k) {
      out.w[p_.Msp - 1 + k] = up * table_[k];  // offset k
      up *= e1;
    }
    for (int k = 1; k < p_.Msp; ++k) {
      out.w[p_.Msp - 1 - k] = down * table_[k];  // offset -k
      down /= e1;
    }
    return out;
  }

 private:
  NufftPlan p_;
  double h_;
  std::array<double, 13> table_{};
};

inline void check_frequencies(const rvec& xi) {
  for (Eigen::Index j = 0; j < xi.size(); ++j)
    if (!(xi[j] >= -pi && xi[j] <= pi))
      throw DomainError("NUFFT frequency outside [-pi, pi]");
}

// Chunks of sources spread into private buffers; a fixed count for a given
// thread cap keeps the merge order, and so the result, reproducible.
inline int chunk_count(Eigen::Index n) {
  const Eigen::Index by_size = std::max<Eigen::Index>(1, (n + 4095) / 4096);
  return static_cast<int>(std::min<Eigen::Index>({8, by_size, max_threads()}));
}

// e^{tau x^2} / sqrt(4 pi tau) * (2 pi / Mr) * e^{-i pi x}; the last factor
// moves the grid origin from -pi back to 0.
inline std::vector<cplx> deconvolution(const NufftPlan& p) {
  std::vector<cplx> d(p.m);
  const double scale = (two_pi / p.Mr) / std::sqrt(4.0 * pi * p.tau);
  for (int i = 0; i < p.m; ++i) {
    const int x = i - p.m / 2;
    d[i] = scale * std::exp(p.tau * double(x) * x) * ((x % 2 == 0) ? 1.0 : -1.0);
  }
  return d;
}

}  // namespace detail

/// f_i = sum_j c_j e^{i xi_j (i - m/2)}, i = 0 .. m-1.
inline cvec nufft1d_type1(const rvec& xi, const cvec& c, int m) {
  if (xi.size() != c.size()) throw UsageError("frequency and coefficient counts differ");
  if (c.size() == 0) throw DomainError("NUFFT needs at least one source");
  detail::check_frequencies(xi);
  const NufftPlan p = NufftPlan::make(m);
  const detail::Spreader sp(p);
  const int Mr = p.Mr, chunks = detail::chunk_count(c.size());
  std::vector<std::vector<cplx>> bufs(chunks, std::vector<cplx>(Mr, 0.0));
  const Eigen::Index n = c.size();
#pragma omp parallel for schedule(static)
  for (int q = 0; q < chunks; ++q) {
    auto& g = bufs[q];
    for (Eigen::Index j = n * q / chunks; j < n * (q + 1) / chunks; ++j) {
      const auto w = sp.weights(xi[j]);
      for (int k = 0; k < 2 * p.Msp; ++k) {
        const int l = ((w.first + k) % Mr + Mr) % Mr;
        g[l] += w.w[k] * c[j];
      }
    }
  }
  for (int q = 1; q < chunks; ++q)
    for (int l = 0; l < Mr; ++l) bufs[0][l] += bufs[q][l];
  auto& grid = bufs[0];
  detail::fftw_backward(grid.data(), Mr, 1);
  const auto dec = detail::deconvolution(p);
  cvec f(m);
  for (int i = 0; i < m; ++i) {
    const int x = i - m / 2;
    f[i] = dec[i] * grid[(x + Mr) % Mr];
  }
  return f;
}

/// F(ix, iy) = sum_j c_j e^{i (xi_j (ix - m/2) + eta_j (iy - m/2))}.
inline cmat nufft2d_type1(const rvec& xi, const rvec& eta, const cvec& c, int m) {
  if (xi.size() != c.size() || eta.size() != c.size())
    throw UsageError("frequency and coefficient counts differ");
  if (c.size() == 0) throw DomainError("NUFFT needs at least one source");
  detail::check_frequencies(xi);
  detail::check_frequencies(eta);
  const NufftPlan p = NufftPlan::make(m);
  const detail::Spreader sp(p);
  const int Mr = p.Mr, S = 2 * p.Msp, chunks = detail::chunk_count(c.size());
  const Eigen::Index n = c.size();
  // Padded grid: index Msp - 1 + l for l in [-(Msp - 1), Mr + Msp], so no
  // wrapping is needed while spreading.
  const int pad = p.Msp - 1, P = Mr + S;
  // Visit sources bin by bin (counting sort on 32 x 32 grid tiles) so the
  // spreading stencil stays in cache.
  const int tiles = (Mr + 31) / 32;
  std::vector<Eigen::Index> order(n), start(std::size_t(tiles) * tiles + 1, 0);
  {
    std::vector<int> tile(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const int tx = std::min(tiles - 1, static_cast<int>((xi[j] + pi) / p.spacing()) / 32);
      const int ty = std::min(tiles - 1, static_cast<int>((eta[j] + pi) / p.spacing()) / 32);
      tile[j] = ty * tiles + tx;
      ++start[tile[j] + 1];
    }
    for (std::size_t t = 1; t < start.size(); ++t) start[t] += start[t - 1];
    std::vector<Eigen::Index> next(start.begin(), start.end() - 1);
    for (Eigen::Index j = 0; j < n; ++j) order[next[tile[j]]++] = j;
  }
  std::vector<cmat> bufs(chunks);
#pragma omp parallel for schedule(static)
  for (int q = 0; q < chunks; ++q) {
    cmat& g = bufs[q];
    g = cmat::Zero(P, P);
    for (Eigen::Index jj = n * q / chunks; jj < n * (q + 1) / chunks; ++jj) {
      const Eigen::Index j = order[jj];
      const auto wx = sp.weights(xi[j]);
      const auto wy = sp.weights(eta[j]);
      // Interleaved (re, im) doubles so the row update vectorizes.
      alignas(64) std::array<double, 48> wxx;
      for (int a = 0; a < S; ++a) wxx[2 * a] = wxx[2 * a + 1] = wx.w[a];
      double* base = reinterpret_cast<double*>(g.data() + (wx.first + pad));
      for (int b = 0; b < S; ++b) {
        const double re = wy.w[b] * c[j].real(), im = wy.w[b] * c[j].imag();
        double* col = base + 2 * Eigen::Index(wy.first + pad + b) * P;
        for (int a = 0; a < 2 * S; a += 2) {
          col[a] += wxx[a] * re;
          col[a + 1] += wxx[a + 1] * im;
        }
      }
    }
  }
  for (int q = 1; q < chunks; ++q) bufs[0] += bufs[q];
  // Fold the padding onto the periodic interior [pad, pad + Mr)^2, then
  // transform the interior in place.
  cmat& g = bufs[0];
  for (int ly = 0; ly < P; ++ly) {
    if (ly >= pad && ly < pad + Mr) continue;
    const int ty = pad + ((ly - pad) % Mr + Mr) % Mr;
    g.col(ty) += g.col(ly);
  }
  for (int ly = pad; ly < pad + Mr; ++ly)
    for (int lx = 0; lx < P; ++lx) {
      if (lx >= pad && lx < pad + Mr) continue;
      g(pad + ((lx - pad) % Mr + Mr) % Mr, ly) += g(lx, ly);
    }
  cplx* interior = g.data() + pad + Eigen::Index(pad) * P;
  detail::fftw_backward_strided(interior, Mr, P);
  const auto dec = detail::deconvolution(p);
  cmat F(m, m);
  for (int iy = 0; iy < m; ++iy) {
    const int ly = (iy - m / 2 + Mr) % Mr;
    for (int ix = 0; ix < m; ++ix) {
      const int lx = (ix - m / 2 + Mr) % Mr;
      F(ix, iy) = dec[ix] * dec[iy] * interior[lx + Eigen::Index(ly) * P];
    }
  }
  return F;
}

}  // namespace fdi
