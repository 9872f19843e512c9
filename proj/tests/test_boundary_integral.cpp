#include <numeric>

#include <gtest/gtest.h>

#include "fdim/validation.hpp"

using namespace fdi;

TEST(Cfie, CircleFarFieldMatchesSeries) {
  const auto r = circle_oracle(5.0, 256, 16);
  EXPECT_LE(r.error, 1e-8);
}

TEST(Cfie, CircleNearFieldMatchesSeries) {
  const double kappa = 5.0, beta = 0.3;
  const Boundary b(sample_boundary(ParametricCurve::circle(1.0), 256));
  const cvec psi = solve_cfie(b, kappa, kappa, IncidentWave::from_angle(kappa, beta));
  for (Vec2 r : {Vec2{3.0, 0.0}, Vec2{-1.5, 2.0}, Vec2{0.0, -1.2}}) {
    const auto v = scattered_field_bie(b, psi, kappa, r);
    EXPECT_LE(std::abs(v.value - circle_series_field(kappa, 1.0, beta, r)), 1e-8);
  }
}

TEST(Cfie, ConvergenceOrderOfSingularQuadrature) {
  // Least-squares slope of log(error) vs log(N) over the pre-asymptotic
  // range of each rule, before round-off takes over.
  struct Case {
    int order;
    std::vector<int> nodes;
  };
  for (const Case& c : {Case{4, {64, 96, 128, 192, 256}}, Case{8, {32, 48, 64, 96, 128}},
                        Case{12, {64, 96, 128, 192}}, Case{16, {48, 64, 96}}}) {
    std::vector<double> lx, ly;
    for (int n : c.nodes) {
      lx.push_back(std::log(double(n)));
      ly.push_back(std::log(circle_oracle(5.0, n, c.order).error));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    EXPECT_GE(-sxy / sxx, c.order - 1.0) << "order " << c.order;
  }
}

TEST(Cfie, ZeroRightHandSide) {
  const Boundary b({ParametricCurve::five_leaf()}, 128);
  const cvec psi = solve_cfie(b, 3.0, 3.0, std::vector<PointSource>{});
  EXPECT_EQ(inf_norm(psi), 0.0);
  EXPECT_EQ(scattered_field_bie(b, cvec::Zero(128), 3.0, {5.0, 1.0}).value, cplx(0.0));
}

TEST(Cfie, InteriorExtinction) {
  const double kappa = 4.0;
  const Boundary b({ParametricCurve::five_leaf({0.3, -0.2}, 0.5)}, 400);
  const auto wave = IncidentWave::from_angle(kappa, 1.3);
  const cvec psi = solve_cfie(b, kappa, kappa, wave);
  for (Vec2 r : {Vec2{0.3, -0.2}, Vec2{1.0, 0.5}, Vec2{-0.8, -0.9}})
    EXPECT_LE(std::abs(single_layer(b, psi, kappa, r) - wave(r)), 1e-8);
}

TEST(Cfie, TotalFieldVanishesTowardsBoundary) {
  // The sound-soft total field decays linearly with the distance to the
  // boundary; compare against the exact series at shrinking distances.
  const double kappa = 5.0, beta = 0.3;
  const Boundary b(sample_boundary(ParametricCurve::circle(1.0), 2048));
  const auto wave = IncidentWave::from_angle(kappa, beta);
  const cvec psi = solve_cfie(b, kappa, kappa, wave);
  double prev = 0.0;
  for (double d : {0.08, 0.04, 0.02}) {
    const Vec2 r = (1.0 + d) * unit_vector(1.0);
    const auto v = scattered_field_bie(b, psi, kappa, r);
    EXPECT_FALSE(v.near_boundary);
    const double total = std::abs(wave(r) + v.value);
    EXPECT_LE(std::abs(v.value - circle_series_field(kappa, 1.0, beta, r)), 1e-10);
    EXPECT_LE(total, kappa * d);
    if (prev > 0.0) EXPECT_NEAR(total / prev, 0.5, 0.05);
    prev = total;
  }
  EXPECT_TRUE(scattered_field_bie(b, psi, kappa, 1.001 * unit_vector(1.0)).near_boundary);
}

TEST(Cfie, RotationEquivariance) {
  const double kappa = 3.0, rho = 0.9, beta = 0.2;
  const Boundary a({ParametricCurve::five_leaf()}, 256);
  const Boundary b({ParametricCurve::five_leaf({}, rho)}, 256);
  const cvec pa = solve_cfie(a, kappa, kappa, IncidentWave::from_angle(kappa, beta));
  const cvec pb = solve_cfie(b, kappa, kappa, IncidentWave::from_angle(kappa, beta + rho));
  EXPECT_LE(inf_norm(pa - pb) / inf_norm(pa), 1e-10);
}

TEST(Cfie, ReciprocityOnCircle) {
  const Boundary b(sample_boundary(ParametricCurve::circle(1.0), 256));
  EXPECT_LE(reciprocity_error(b, 5.0, 8, 3), 1e-8);
}

TEST(Cfie, PointSourceRightHandSide) {
  // Point-source incidence; inside the obstacle the single layer reproduces it.
  const double kappa = 2.0;
  const Boundary b(sample_boundary(ParametricCurve::circle(1.0), 256));
  const std::vector<PointSource> src{{{3.0, 0.5}, cplx(1.0, 0.5)}};
  const cvec psi = solve_cfie(b, kappa, kappa, src);
  const Vec2 r{0.2, 0.1};
  EXPECT_LE(std::abs(single_layer(b, psi, kappa, r) - cplx(1.0, 0.5) * green(kappa, r, {3.0, 0.5})),
            1e-9);
}

TEST(Cfie, EvaluationInsideRejected) {
  const Boundary b({ParametricCurve::five_leaf()}, 64);
  EXPECT_THROW(scattered_field_bie(b, cvec::Zero(64), 1.0, {0.1, 0.1}), DomainError);
}

namespace {

// Corrected trapezoid rule for int_0^{2 pi} cos(m t) log|2 sin(t/2)| dt = -pi/m.
double log_moment_error(int order, int n, int m) {
  const AlpertRule& r = alpert_rule(order);
  const double h = two_pi / n;
  auto f = [m](double t) { return std::cos(m * t) * std::log(std::abs(2.0 * std::sin(0.5 * t))); };
  double s = 0.0;
  for (int k = r.a; k <= n - r.a; ++k) s += h * f(k * h);
  for (std::size_t q = 0; q < r.x.size(); ++q) s += h * r.w[q] * (f(r.x[q] * h) + f(-r.x[q] * h));
  return std::abs(s + pi / m);
}

}  // namespace

TEST(Alpert, LogSingularMoments) {
  const std::pair<int, double> bound[] = {{4, 1e-6}, {8, 1e-10}, {12, 1e-10}, {16, 1e-14}};
  for (const auto& [order, tol] : bound)
    for (int m : {1, 3, 5}) EXPECT_LE(log_moment_error(order, 128, m), tol) << order << " " << m;
  // Halving h gains at least the nominal order (less one) for the low rules.
  EXPECT_GE(std::log2(log_moment_error(4, 64, 3) / log_moment_error(4, 128, 3)), 3.0);
  EXPECT_GE(std::log2(log_moment_error(8, 32, 3) / log_moment_error(8, 64, 3)), 7.0);
}

TEST(Alpert, UnsupportedOrder) { EXPECT_THROW(alpert_rule(6), ConfigError); }
