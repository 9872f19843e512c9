#include <gtest/gtest.h>

#include "fdim/validation.hpp"

using namespace fdi;

namespace {

PointScattererSet linear_set(std::vector<Vec2> pos, double sigma) {
  ScattererCoefficients c;
  c.lin1 = sigma;
  return PointScattererSet::uniform(Nonlinearity::linear, std::move(pos), c);
}

PointScattererSet quadratic_set(std::vector<Vec2> pos) {
  ScattererCoefficients c;
  c.lin1 = c.lin2 = 0.5;
  c.nl1 = c.nl2 = 0.4;
  return PointScattererSet::uniform(Nonlinearity::quadratic, std::move(pos), c);
}

}  // namespace

TEST(FarField, Constant) {
  for (double k : {0.5, 2.0, 50.0})
    EXPECT_NEAR(std::norm(far_field_constant(k)), 1.0 / (8.0 * pi * k), 1e-16);
}

TEST(FarField, SinglePointAtOrigin) {
  const auto set = linear_set({{0.0, 0.0}}, 0.7);
  const auto wave = IncidentWave::from_angle(3.0, 0.2);
  const auto f = solve_linear_fl(set, wave);
  const cplx expect = far_field_constant(3.0) * 0.7 * f.first[0];
  for (double a : {0.0, 1.0, 2.5, 4.0})
    EXPECT_LE(std::abs(far_field(set, f, unit_vector(a), 1, 3.0) - expect), 1e-16);
}

TEST(FarField, ZeroSolution) {
  const auto set = linear_set({{1.0, 0.0}, {0.0, 2.0}}, 0.7);
  ExternalFields zero{Nonlinearity::linear, cvec::Zero(2), {}, 0};
  EXPECT_EQ(far_field(set, zero, {1.0, 0.0}, 1, 3.0), cplx(0.0));
  EXPECT_EQ(far_field_boundary(Boundary({ParametricCurve::circle(1.0)}, 32), cvec::Zero(32), 3.0,
                               {0.0, 1.0}),
            cplx(0.0));
}

TEST(FarField, MismatchedInputs) {
  const auto set = linear_set({{1.0, 0.0}}, 0.7);
  const auto f = solve_linear_fl(set, IncidentWave::from_angle(1.0, 0.0));
  EXPECT_THROW(far_field(set, f, {1.0, 0.1}, 1, 1.0), DomainError);
  EXPECT_THROW(far_field(set, f, {1.0, 0.0}, 2, 1.0), UsageError);
  EXPECT_THROW(far_field(quadratic_set({{1.0, 0.0}}), f, {1.0, 0.0}, 1, 1.0), UsageError);
}

TEST(FarField, CircleMatchesSeries) { EXPECT_LE(circle_oracle(5.0, 256).error, 1e-8); }

TEST(FarField, AsymptoticConsistency) {
  const double kappa = 2.0, R = 1e4;
  const Boundary b({ParametricCurve::five_leaf()}, 256);
  const auto set = linear_set({{4.0, 1.0}, {-3.5, 2.5}}, 0.5);
  const auto wave = IncidentWave::from_angle(kappa, 0.7);
  const auto s = solve_gfl_linear(b, set, wave);
  for (double a : {0.3, 2.0, 4.4}) {
    const Vec2 rhat = unit_vector(a), r = R * rhat;
    cplx near = scattered_field_bie(b, s.density1, kappa, r).value;
    for (int k = 0; k < set.size(); ++k)
      near += 0.5 * s.fields.first[k] * green(kappa, r, set.positions[k]);
    const cplx ff = far_field(b, set, s, rhat, 1);
    EXPECT_LE(std::abs(near * std::sqrt(R) * std::exp(-I * kappa * R) - ff) / std::abs(ff), 1e-3);
  }
}

TEST(ResponseMatrix, ObstacleOnlyMatchesPerEntryFarField) {
  const double kappa = 5.0;
  const Boundary b({ParametricCurve::five_leaf()}, 256);
  const Scene scene{{ParametricCurve::five_leaf()}, {}};
  const DirectionGrid g{4, 4};
  const auto R = build_response_matrix(scene, b, g, kappa, 1, Modality::plain);
  ASSERT_EQ(R.P.rows(), 4);
  ASSERT_EQ(R.P.cols(), 4);
  for (int j = 0; j < 4; ++j) {
    const cvec psi = solve_cfie(b, kappa, kappa, column_wave(g, j, kappa, 1.0));
    for (int i = 0; i < 4; ++i)
      EXPECT_LE(std::abs(R.P(i, j) - far_field_boundary(b, psi, kappa, g.observation(i))), 1e-13);
  }
}

TEST(ResponseMatrix, ReciprocitySymmetry) {
  // Columns are waves arriving from d_j, so reciprocity makes P symmetric.
  const double kappa = 3.0;
  const Scene scene{{ParametricCurve::five_leaf()},
                    linear_set({{-4.0, 1.0}, {3.5, 3.0}, {0.5, -4.5}}, 0.5)};
  const Boundary b(scene.obstacles, 192);
  const auto R = build_response_matrix(scene, b, {16, 16}, kappa, 1, Modality::plain);
  EXPECT_LE((R.P - R.P.transpose()).cwiseAbs().maxCoeff() / R.P.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ResponseMatrix, ColumnsAreIndependentSolves) {
  const double kappa = 2.0;
  const Scene scene{{ParametricCurve::five_leaf()}, linear_set({{-4.0, 1.0}, {3.5, 3.0}}, 0.5)};
  const Boundary b(scene.obstacles, 128);
  const DirectionGrid g{12, 12};
  const auto R = build_response_matrix(scene, b, g, kappa, 1, Modality::plain);
  for (int j : {0, 5, 11}) {
    const auto s = solve_gfl_linear(b, scene.scatterers, column_wave(g, j, kappa, 1.0));
    for (int i = 0; i < 12; ++i)
      EXPECT_LE(std::abs(R.P(i, j) - far_field(b, scene.scatterers, s, g.observation(i), 1)), 1e-12);
  }
}

TEST(ResponseMatrix, DifferencingWithoutObstacleVanishes) {
  const Scene scene{{}, quadratic_set({{-13.0, 0.0}, {-14.0, 0.0}})};
  const auto R =
      build_response_matrix(scene, Boundary{}, {8, 8}, 2.0, 2, Modality::gfl_minus_fl, {},
                            std::vector<double>{13.0, 14.0});
  EXPECT_EQ(R.P.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ResponseMatrix, MovingScatterersUseTheSameGeometryInBothTerms) {
  const double kappa = 2.0;
  const std::vector<double> radii{13.0, 14.0};
  const Scene scene{{ParametricCurve::five_leaf()}, quadratic_set({{-13.0, 0.0}, {-14.0, 0.0}})};
  const Boundary b(scene.obstacles, 128);
  const DirectionGrid g{8, 8};
  const auto R = build_response_matrix(scene, b, g, kappa, 2, Modality::gfl_minus_fl, {}, radii);
  for (int j : {1, 6}) {
    const auto set = scene.scatterers.with_positions(place_aligned_point_scatterers(radii, g.beta(j)));
    const auto wave = column_wave(g, j, kappa, 1.0);
    const auto coupled = solve_gfl(b, set, wave);
    const auto alone = solve_fl(set, wave);
    for (int i = 0; i < 8; ++i) {
      const Vec2 rhat = g.observation(i);
      const cplx expect = far_field(b, set, coupled, rhat, 2) - far_field(set, alone, rhat, 2, kappa);
      EXPECT_LE(std::abs(R.P(i, j) - expect), 1e-10 * (1.0 + std::abs(expect)));
    }
  }
}

TEST(ResponseMatrix, DifferencingRequiresHigherHarmonic) {
  const Scene scene{{ParametricCurve::five_leaf()}, quadratic_set({{-13.0, 0.0}, {-14.0, 0.0}})};
  const Boundary b(scene.obstacles, 64);
  EXPECT_THROW(build_response_matrix(scene, b, {4, 4}, 2.0, 1, Modality::gfl_minus_fl),
               UsageError);
}
