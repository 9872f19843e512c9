#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fdim/common.hpp"

namespace fdi {

/// Star-shaped closed curve x(t) = center + R(rotation) r(t) (cos t, sin t)
/// with r(t) = a0 + sum_m (a_m cos mt + b_m sin mt).
class ParametricCurve {
 public:
  enum class Kind { circle, five_leaf, custom };

  ParametricCurve() = default;
  ParametricCurve(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                  Vec2 center = {}, double rotation = 0.0, Kind kind = Kind::custom)
      : kind_(kind), center_(center), rotation_(rotation), a0_(a0),
        a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)) {
    a_.resize(std::max(a_.size(), b_.size()), 0.0);
    b_.resize(a_.size(), 0.0);
  }

  static ParametricCurve circle(double radius, Vec2 center = {}) {
    return {radius, {}, {}, center, 0.0, Kind::circle};
  }

  /// r(t) = 2 + 0.5 cos 5t.
  static ParametricCurve five_leaf(Vec2 center = {}, double rotation = 0.0) {
    return {2.0, {0.0, 0.0, 0.0, 0.0, 0.5}, {}, center, rotation, Kind::five_leaf};
  }

  Kind kind() const { return kind_; }
  Vec2 center() const { return center_; }
  double rotation() const { return rotation_; }
  double a0() const { return a0_; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

  ParametricCurve translated(Vec2 shift) const {
    ParametricCurve c = *this;
    c.center_ += shift;
    return c;
  }
  ParametricCurve rotated_about_origin(double angle) const {
    ParametricCurve c = *this;
    c.center_ = rotate(center_, angle);
    c.rotation_ += angle;
    return c;
  }

  /// r(t) and its first two derivatives.
  std::array<double, 3> radial(double t) const {
    double r = a0_, r1 = 0.0, r2 = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      const double m = static_cast<double>(k + 1);
      const double c = std::cos(m * t), s = std::sin(m * t);
      r += a_[k] * c + b_[k] * s;
      r1 += m * (-a_[k] * s + b_[k] * c);
      r2 -= m * m * (a_[k] * c + b_[k] * s);
    }
    return {r, r1, r2};
  }

  struct Point {
    Vec2 x, dx, ddx;
  };

  Point evaluate(double t) const {
    const auto [r, r1, r2] = radial(t);
    const Vec2 e{std::cos(t), std::sin(t)}, p{-e.y, e.x};
    return {center_ + rotate(r * e, rotation_), rotate(r1 * e + r * p, rotation_),
            rotate((r2 - r) * e + 2.0 * r1 * p, rotation_)};
  }

  Vec2 position(double t) const { return evaluate(t).x; }

  /// Signed: negative inside, zero on the curve, positive outside, measured
  /// radially from the center.
  double radial_excess(Vec2 p) const {
    const Vec2 local = rotate(p - center_, -rotation_);
    const double rho = norm(local);
    if (rho == 0.0) return -radial(0.0)[0];
    return rho - radial(std::atan2(local.y, local.x))[0];
  }

  bool contains(Vec2 p) const { return radial_excess(p) <= 0.0; }

  /// Bounding radius about the center.
  double max_radius() const {
    double bound = std::abs(a0_);
    for (std::size_t k = 0; k < a_.size(); ++k) bound += std::hypot(a_[k], b_[k]);
    return bound;
  }

 private:
  Kind kind_ = Kind::custom;
  Vec2 center_{};
  double rotation_ = 0.0;
  double a0_ = 1.0;
  std::vector<double> a_, b_;
};

/// Uniform parameter sampling of one closed curve.
struct BoundaryDiscretization {
  ParametricCurve curve;
  int n = 0;
  double h = 0.0;  // parameter spacing 2 pi / n
  std::vector<double> t;
  std::vector<Vec2> x;
  std::vector<Vec2> normal;  // outward unit normals
  std::vector<double> speed;  // |x'(t)|
  std::vector<double> curvature;

  int size() const { return n; }
  /// Trapezoid estimate of the arclength.
  double arclength() const {
    double s = 0.0;
    for (double v : speed) s += v;
    return s * h;
  }
};

inline Vec2 outward_normal(Vec2 dx) {
  const double s = norm(dx);
  return {dx.y / s, -dx.x / s};
}

inline double signed_curvature(const ParametricCurve::Point& p) {
  const double s = norm(p.dx);
  return cross(p.dx, p.ddx) / (s * s * s);
}

inline BoundaryDiscretization sample_boundary(const ParametricCurve& curve, int n) {
  if (n < 16 || n % 2 != 0)
    throw DomainError("boundary sampling needs an even node count of at least 16");
  BoundaryDiscretization d;
  d.curve = curve;
  d.n = n;
  d.h = two_pi / n;
  d.t.resize(n);
  d.x.resize(n);
  d.normal.resize(n);
  d.speed.resize(n);
  d.curvature.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = two_pi * i / n;
    if (curve.radial(t)[0] <= 0.0)
      throw DegenerateCurveError("radial function is not positive at t = " + std::to_string(t));
    const auto p = curve.evaluate(t);
    d.t[i] = t;
    d.x[i] = p.x;
    d.speed[i] = norm(p.dx);
    d.normal[i] = outward_normal(p.dx);
    d.curvature[i] = signed_curvature(p);
    if (dot(d.normal[i], p.x - curve.center()) <= 0.0)
      throw DegenerateCurveError("normal is not outward at t = " + std::to_string(t));
  }
  return d;
}

enum class Nonlinearity { linear, quadratic, cubic };

inline int higher_harmonic(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::quadratic: return 2;
    case Nonlinearity::cubic: return 3;
    default: return 1;
  }
}

inline std::string to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::quadratic: return "quadratic";
    case Nonlinearity::cubic: return "cubic";
    default: return "linear";
  }
}

/// Coefficients of one scatterer. For a linear scatterer only `lin1` is
/// used (sigma_k). For quadratic and cubic ones `lin1`, `lin2` are the linear
/// coefficients at the base and the higher harmonic and `nl1..nl3` the
/// nonlinear ones, in the order the field equations list them.
struct ScattererCoefficients {
  double lin1 = 0.0;
  double lin2 = 0.0;
  double nl1 = 0.0;
  double nl2 = 0.0;
  double nl3 = 0.0;
};

inline constexpr double min_scatterer_separation = 1e-8;

struct PointScattererSet {
  Nonlinearity nonlinearity = Nonlinearity::linear;
  std::vector<Vec2> positions;
  std::vector<ScattererCoefficients> coefficients;

  int size() const { return static_cast<int>(positions.size()); }

  static PointScattererSet uniform(Nonlinearity kind, std::vector<Vec2> pos,
                                   ScattererCoefficients c) {
    PointScattererSet s{kind, std::move(pos), {}};
    s.coefficients.assign(s.positions.size(), c);
    return s;
  }

  PointScattererSet with_positions(std::vector<Vec2> pos) const {
    if (pos.size() != positions.size())
      throw UsageError("position count does not match the scatterer set");
    PointScattererSet s = *this;
    s.positions = std::move(pos);
    return s;
  }

  /// Copy with every nonlinear coefficient set to zero.
  PointScattererSet linearized() const {
    PointScattererSet s = *this;
    for (auto& c : s.coefficients) c.nl1 = c.nl2 = c.nl3 = 0.0;
    return s;
  }

  std::vector<double> linear_sigma(int harmonic = 1) const {
    std::vector<double> s;
    for (const auto& c : coefficients) s.push_back(harmonic == 1 ? c.lin1 : c.lin2);
    return s;
  }
};

/// Positions radii_k (cos beta, sin beta).
inline std::vector<Vec2> place_aligned_point_scatterers(const std::vector<double>& radii,
                                                        double beta) {
  std::vector<Vec2> pos;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && radii[k] <= radii[k - 1]))
      throw DomainError("aligned radii must be positive and strictly increasing");
    pos.push_back(radii[k] * unit_vector(beta));
  }
  return pos;
}

/// Plane wave amplitude * exp(i kappa r.d).
struct IncidentWave {
  double kappa = 1.0;
  Vec2 d{1.0, 0.0};
  double amplitude = 1.0;

  static IncidentWave from_angle(double kappa, double beta, double amplitude = 1.0) {
    return {kappa, unit_vector(beta), amplitude};
  }

  cplx operator()(Vec2 r) const {
    const double ph = kappa * dot(r, d);
    return amplitude * cplx(std::cos(ph), std::sin(ph));
  }
  cplx dnu(Vec2 r, Vec2 nu) const { return I * kappa * dot(nu, d) * (*this)(r); }

  void validate() const {
    if (!(kappa > 0.0)) throw DomainError("wavenumber must be positive");
    if (std::abs(norm(d) - 1.0) > 1e-14) throw DomainError("direction must be a unit vector");
  }
};

struct HarmonicSet {
  double kappa = 1.0;
  std::vector<int> orders;

  static HarmonicSet for_nonlinearity(double kappa, Nonlinearity n) {
    if (n == Nonlinearity::linear) return {kappa, {1}};
    return {kappa, {1, higher_harmonic(n)}};
  }
  double wavenumber(int j) const { return j * kappa; }
};

struct Scene {
  std::vector<ParametricCurve> obstacles;
  PointScattererSet scatterers;

  bool has_obstacles() const { return !obstacles.empty(); }
  bool has_scatterers() const { return scatterers.size() > 0; }

  /// Checks the invariants that every solver relies on.
  void validate() const {
    const auto& s = scatterers;
    if (s.coefficients.size() != s.positions.size())
      throw ConfigError("each point scatterer needs one coefficient set");
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      if (s.nonlinearity == Nonlinearity::linear && s.coefficients[i].lin1 < 0.0)
        throw ConfigError("linear scattering coefficients must be non-negative");
      for (const auto& ob : obstacles)
        if (ob.contains(s.positions[i]))
          throw ConfigError("point scatterer " + std::to_string(i) +
                            " lies inside or on an obstacle");
    }
    // Sort by x so the separation test is not quadratic for large sets.
    std::vector<int> order(s.positions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return s.positions[a].x < s.positions[b].x; });
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t k = i + 1; k < order.size(); ++k) {
        const Vec2 a = s.positions[order[i]], b = s.positions[order[k]];
        if (b.x - a.x >= min_scatterer_separation) break;
        if (distance(a, b) < min_scatterer_separation)
          throw ConfigError("point scatterers " + std::to_string(order[i]) + " and " +
                            std::to_string(order[k]) + " coincide");
      }
  }
};

/// Discretization of all obstacles, concatenated.
struct Boundary {
  std::vector<BoundaryDiscretization> parts;
  std::vector<int> offsets;
  int total = 0;

  Boundary() = default;
  Boundary(const std::vector<ParametricCurve>& curves, int nodes_per_curve) {
    for (const auto& c : curves) add(sample_boundary(c, nodes_per_curve));
  }
  explicit Boundary(BoundaryDiscretization d) { add(std::move(d)); }

  void add(BoundaryDiscretization d) {
    offsets.push_back(total);
    total += d.n;
    parts.push_back(std::move(d));
  }
  int size() const { return total; }
  bool empty() const { return total == 0; }

  template <class F>
  void for_each_node(F&& f) const {
    for (std::size_t p = 0; p < parts.size(); ++p)
      for (int i = 0; i < parts[p].n; ++i) f(offsets[p] + i, parts[p], i);
  }

  bool contains(Vec2 r) const {
    for (const auto& p : parts)
      if (p.curve.contains(r)) return true;
    return false;
  }

  /// Distance from r to the nearest node, with the largest node spacing in
  /// arclength among the parts.
  std::pair<double, double> nearest_node_distance(Vec2 r) const {
    double best = std::numeric_limits<double>::infinity(), spacing = 0.0;
    for (const auto& p : parts) {
      for (int i = 0; i < p.n; ++i) {
        best = std::min(best, distance(r, p.x[i]));
        spacing = std::max(spacing, p.speed[i] * p.h);
      }
    }
    return {best, spacing};
  }
};

}  // namespace fdi
