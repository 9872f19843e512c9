#pragma once

// Image quality measures: point-spread width, ridge width across a known
// boundary, ridge contrast and ridge localization.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdim/imaging.hpp"

namespace fdi {

/// Rank-one response of a weak point scatterer at r0 on a square grid:
/// P = w w^T with w_i = e^{-i kappa r0 . rhat_i} / sqrt(M).
inline ResponseMatrix born_response(Vec2 r0, int directions, double kappa) {
  DirectionGrid g{directions, directions};
  cvec w(directions);
  for (int i = 0; i < directions; ++i)
    w[i] = std::exp(-I * kappa * dot(r0, g.observation(i))) / std::sqrt(double(directions));
  return {w * w.transpose(), kappa, 1, g};
}

/// Bilinear interpolation of |I| at an arbitrary point; NaN outside the grid.
inline double magnitude_at(const ImageGrid& img, const rmat& mag, Vec2 p) {
  const double h = img.spec.spacing();
  const double fx = (p.x + img.spec.half_width) / h, fy = (p.y + img.spec.half_width) / h;
  const int n = img.spec.samples;
  if (fx < 0.0 || fy < 0.0 || fx > n - 1 || fy > n - 1) return std::nan("");
  const int ix = std::min(static_cast<int>(fx), n - 2), iy = std::min(static_cast<int>(fy), n - 2);
  const double tx = fx - ix, ty = fy - iy;
  return (1 - tx) * (1 - ty) * mag(ix, iy) + tx * (1 - ty) * mag(ix + 1, iy) +
         (1 - tx) * ty * mag(ix, iy + 1) + tx * ty * mag(ix + 1, iy + 1);
}

struct Peak {
  int ix = 0, iy = 0;
  Vec2 position;
  double value = 0.0;
};

inline Peak image_peak(const ImageGrid& img) {
  const rmat mag = img.magnitude();
  Peak p;
  p.value = mag.maxCoeff(&p.ix, &p.iy);
  p.position = {img.spec.coord(p.ix), img.spec.coord(p.iy)};
  return p;
}

/// Radius of the disc with the same area as the connected region around the
/// peak where |I| >= peak / sqrt(2).
inline double half_power_radius(const ImageGrid& img) {
  const rmat mag = img.magnitude();
  const Peak pk = image_peak(img);
  const double level = pk.value / std::sqrt(2.0);
  const int n = img.spec.samples;
  std::vector<char> seen(std::size_t(n) * n, 0);
  std::vector<std::pair<int, int>> stack{{pk.ix, pk.iy}};
  seen[std::size_t(pk.iy) * n + pk.ix] = 1;
  long count = 0;
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    ++count;
    const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : nb) {
      const int u = x + d[0], v = y + d[1];
      if (u < 0 || v < 0 || u >= n || v >= n) continue;
      auto& s = seen[std::size_t(v) * n + u];
      if (s || mag(u, v) < level) continue;
      s = 1;
      stack.push_back({u, v});
    }
  }
  const double h = img.spec.spacing();
  return std::sqrt(count * h * h / pi);
}

/// Points on the true boundaries, equally spaced in the curve parameter,
/// with outward normals and arclength weights.
struct RidgeProbe {
  std::vector<Vec2> x, normal;
  std::vector<double> weight;
};

inline RidgeProbe ridge_probe(const std::vector<ParametricCurve>& curves, int per_curve) {
  RidgeProbe p;
  for (const auto& c : curves) {
    const double h = two_pi / per_curve;
    for (int i = 0; i < per_curve; ++i) {
      const auto pt = c.evaluate(i * h);
      p.x.push_back(pt.x);
      p.normal.push_back(outward_normal(pt.dx));
      p.weight.push_back(norm(pt.dx) * h);
    }
  }
  return p;
}

/// |I| / max|I| along the normal line x + s nu for s in [-w, w].
inline std::vector<double> normal_profile(const ImageGrid& img, const rmat& mag, double peak,
                                          Vec2 x, Vec2 nu, double w, int samples) {
  std::vector<double> prof(samples);
  for (int k = 0; k < samples; ++k) {
    const double s = -w + 2.0 * w * k / (samples - 1);
    prof[k] = magnitude_at(img, mag, x + s * nu) / peak;
  }
  return prof;
}

/// Mean full width at half maximum of the ridge across the boundary. For
/// each probe point the profile maximum within +-w is located and the
/// contiguous run above half of it is measured; runs reaching the window
/// edge count as 2w.
inline double mean_ridge_fwhm(const ImageGrid& img, const RidgeProbe& probe, double w,
                              int samples = 401) {
  const rmat mag = img.magnitude();
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) return 2.0 * w;
  const double ds = 2.0 * w / (samples - 1);
  double total = 0.0, weight = 0.0;
  for (std::size_t q = 0; q < probe.x.size(); ++q) {
    const auto prof = normal_profile(img, mag, peak, probe.x[q], probe.normal[q], w, samples);
    if (std::any_of(prof.begin(), prof.end(), [](double v) { return std::isnan(v); })) continue;
    const auto it = std::max_element(prof.begin(), prof.end());
    const int k0 = static_cast<int>(it - prof.begin());
    const double half = 0.5 * *it;
    int lo = k0, hi = k0;
    while (lo > 0 && prof[lo - 1] >= half) --lo;
    while (hi < samples - 1 && prof[hi + 1] >= half) ++hi;
    // Linear interpolation of the crossings.
    double left = lo * ds, right = hi * ds;
    if (lo > 0) left -= ds * (prof[lo] - half) / (prof[lo] - prof[lo - 1]);
    if (hi < samples - 1) right += ds * (prof[hi] - half) / (prof[hi] - prof[hi + 1]);
    total += probe.weight[q] * (right - left);
    weight += probe.weight[q];
  }
  return weight > 0.0 ? total / weight : 2.0 * w;
}

/// Mean of the per-probe maximum of |I| within +-band of the boundary,
/// divided by the mean |I| over grid points farther than `clearance` from
/// every probe point.
inline double ridge_contrast(const ImageGrid& img, const RidgeProbe& probe, double band,
                             double clearance) {
  const rmat mag = img.magnitude();
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  double ridge = 0.0, rw = 0.0;
  for (std::size_t q = 0; q < probe.x.size(); ++q) {
    const auto prof = normal_profile(img, mag, peak, probe.x[q], probe.normal[q], band, 41);
    double m = 0.0;
    bool ok = true;
    for (double v : prof) {
      if (std::isnan(v)) ok = false;
      else m = std::max(m, v);
    }
    if (!ok) continue;
    ridge += probe.weight[q] * m;
    rw += probe.weight[q];
  }
  double bg = 0.0;
  long count = 0;
  const int n = img.spec.samples;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 p{img.spec.coord(ix), img.spec.coord(iy)};
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& x : probe.x) dmin = std::min(dmin, distance(p, x));
      if (dmin <= clearance) continue;
      bg += mag(ix, iy) / peak;
      ++count;
    }
  if (rw == 0.0 || count == 0 || bg == 0.0) return 0.0;
  return (ridge / rw) / (bg / count);
}

/// Fraction of boundary arclength whose normal-line maximum of |I| within
/// +-w lies within `tolerance` of the curve.
inline double ridge_localized_fraction(const ImageGrid& img, const RidgeProbe& probe, double w,
                                       double tolerance, int samples = 401) {
  const rmat mag = img.magnitude();
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  double good = 0.0, total = 0.0;
  for (std::size_t q = 0; q < probe.x.size(); ++q) {
    total += probe.weight[q];
    const auto prof = normal_profile(img, mag, peak, probe.x[q], probe.normal[q], w, samples);
    int best = -1;
    for (int k = 0; k < samples; ++k)
      if (!std::isnan(prof[k]) && (best < 0 || prof[k] > prof[best])) best = k;
    if (best < 0) continue;
    const double s = -w + 2.0 * w * best / (samples - 1);
    if (std::abs(s) <= tolerance) good += probe.weight[q];
  }
  return total > 0.0 ? good / total : 0.0;
}

}  // namespace fdi
