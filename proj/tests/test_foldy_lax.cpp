#include <gtest/gtest.h>

#include "fdim/validation.hpp"

using namespace fdi;

namespace {

PointScattererSet linear_set(std::vector<Vec2> pos, double sigma) {
  ScattererCoefficients c;
  c.lin1 = sigma;
  return PointScattererSet::uniform(Nonlinearity::linear, std::move(pos), c);
}

PointScattererSet nonlinear_set(Nonlinearity kind, std::vector<Vec2> pos, double lin, double nl) {
  ScattererCoefficients c;
  c.lin1 = c.lin2 = lin;
  c.nl1 = c.nl2 = nl;
  if (kind == Nonlinearity::cubic) c.nl3 = nl;
  return PointScattererSet::uniform(kind, std::move(pos), c);
}

double fl_residual(const PointScattererSet& set, const IncidentWave& wave, const ExternalFields& f) {
  const NonlinearSystem sys = foldy_lax_system(set, wave);
  return inf_norm(sys.residual(f.first, f.higher));
}

}  // namespace

TEST(FoldyLaxMatrix, SmallCases) {
  EXPECT_EQ(assemble_foldy_lax_matrix(linear_set({{0, 0}}, 0.5), 3.0), cmat::Identity(1, 1));
  EXPECT_EQ(assemble_foldy_lax_matrix(linear_set({{0, 0}, {1, 2}, {3, 1}}, 0.0), 3.0),
            cmat::Identity(3, 3));
  const cmat A = assemble_foldy_lax_matrix(linear_set({{0, 0}, {1, 0}}, 0.5), 10.0);
  const cplx off = -0.5 * 0.25 * I * hankel1_0(10.0);
  EXPECT_EQ(A(0, 0), cplx(1.0));
  EXPECT_LE(std::abs(A(0, 1) - off), 1e-15);
  EXPECT_LE(std::abs(A(1, 0) - off), 1e-15);
}

TEST(LinearFoldyLax, SingleScatterer) {
  const auto wave = IncidentWave::from_angle(4.0, 0.3);
  const auto f = solve_linear_fl(linear_set({{0.7, -0.2}}, 0.5), wave);
  EXPECT_LE(std::abs(f.first[0] - wave({0.7, -0.2})), 1e-15);
}

TEST(LinearFoldyLax, ZeroCoefficients) {
  const auto wave = IncidentWave::from_angle(4.0, 0.3);
  const std::vector<Vec2> pos{{0, 0}, {1, 1}, {-2, 0.5}};
  const auto f = solve_linear_fl(linear_set(pos, 0.0), wave);
  for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(f.first[k] - wave(pos[k])), 1e-15);
}

TEST(LinearFoldyLax, TwoByTwoClosedForm) {
  const auto wave = IncidentWave::from_angle(10.0, 0.0);
  const std::vector<Vec2> pos{{0, 0}, {1, 0}};
  const auto f = solve_linear_fl(linear_set(pos, 0.5), wave);
  const cplx g = -0.5 * green(10.0, pos[0], pos[1]);
  const cplx det = 1.0 - g * g;
  const cplx a = wave(pos[0]), b = wave(pos[1]);
  EXPECT_LE(std::abs(f.first[0] - (a - g * b) / det), 1e-14);
  EXPECT_LE(std::abs(f.first[1] - (b - g * a) / det), 1e-14);
}

TEST(LinearFoldyLax, BornLimit) {
  const auto wave = IncidentWave::from_angle(3.0, 1.1);
  const std::vector<Vec2> pos{{0, 0}, {1.5, 0.2}, {-0.4, 2.0}, {2.2, -1.7}};
  const std::vector<double> sigma0{0.7, 0.3, 1.1, 0.5};
  const double eps = 1e-6;
  PointScattererSet set = linear_set(pos, 0.0);
  for (int k = 0; k < 4; ++k) set.coefficients[k].lin1 = eps * sigma0[k];
  const auto f = solve_linear_fl(set, wave);
  for (int k = 0; k < 4; ++k) {
    cplx born = 0.0;
    for (int q = 0; q < 4; ++q)
      if (q != k) born += sigma0[q] * wave(pos[q]) * green(3.0, pos[k], pos[q]);
    const cplx got = (f.first[k] - wave(pos[k])) / eps;
    EXPECT_LE(std::abs(got - born) / std::abs(born), 1e-4);
  }
}

TEST(QuadraticFoldyLax, DecouplesWithoutSecondHarmonicCoefficients) {
  const auto wave = IncidentWave::from_angle(2.0, 0.5);
  const std::vector<Vec2> pos{{0, 0}, {1.2, 0.4}, {-0.7, 1.9}};
  const auto set = nonlinear_set(Nonlinearity::quadratic, pos, 0.5, 0.0);
  const auto f = solve_quadratic_fl(set, wave);
  const auto lin = solve_linear_fl(linear_set(pos, 0.5), wave);
  EXPECT_LE(inf_norm(f.first - lin.first), 1e-13);
  EXPECT_EQ(inf_norm(f.higher), 0.0);
}

TEST(QuadraticFoldyLax, SingleScatterer) {
  const auto wave = IncidentWave::from_angle(2.0, 0.5);
  const auto f = solve_quadratic_fl(nonlinear_set(Nonlinearity::quadratic, {{1, 2}}, 0.5, 0.4), wave);
  EXPECT_LE(std::abs(f.first[0] - wave({1, 2})), 1e-15);
  EXPECT_EQ(f.higher[0], cplx(0.0));
}

TEST(CubicFoldyLax, SingleScattererAndDecoupling) {
  const auto wave = IncidentWave::from_angle(2.0, 0.5);
  const auto one = solve_cubic_fl(nonlinear_set(Nonlinearity::cubic, {{1, 2}}, 0.5, 0.4), wave);
  EXPECT_LE(std::abs(one.first[0] - wave({1, 2})), 1e-15);
  EXPECT_EQ(one.higher[0], cplx(0.0));

  const std::vector<Vec2> pos{{0, 0}, {0.8, -0.3}};
  auto set = nonlinear_set(Nonlinearity::cubic, pos, 0.5, 0.0);
  const auto f = solve_cubic_fl(set, wave);
  EXPECT_LE(inf_norm(f.first - solve_linear_fl(linear_set(pos, 0.5), wave).first), 1e-13);
  EXPECT_EQ(inf_norm(f.higher), 0.0);
}

class NonlinearVsPicard : public ::testing::TestWithParam<Nonlinearity> {};

TEST_P(NonlinearVsPicard, TwoScatterersFarAway) {
  const Nonlinearity kind = GetParam();
  const auto set = nonlinear_set(kind, {{-13.0, 0.0}, {-14.0, 0.0}}, 0.5, 0.4);
  const IncidentWave wave{2.0, {1.0, 0.0}};
  const auto f = solve_fl(set, wave);
  const auto p = picard_coupled(Boundary{}, set, wave, {}, 1e-14);
  EXPECT_LE(inf_norm(f.first - p.fields.first), 1e-9);
  EXPECT_LE(inf_norm(f.higher - p.fields.higher), 1e-9);
  EXPECT_LE(fl_residual(set, wave, f), 1e-10);
  EXPECT_GT(inf_norm(f.higher), 0.0);
}

TEST_P(NonlinearVsPicard, CloselySpacedCluster) {
  const Nonlinearity kind = GetParam();
  const auto set = nonlinear_set(kind, {{0, 0}, {0.9, 0.1}, {0.2, 1.1}, {1.3, 1.0}}, 0.5, 0.4);
  const auto wave = IncidentWave::from_angle(2.0, 2.2);
  const auto f = solve_fl(set, wave);
  const auto p = picard_coupled(Boundary{}, set, wave, {}, 1e-14);
  EXPECT_LE(inf_norm(f.first - p.fields.first), 1e-9);
  EXPECT_LE(inf_norm(f.higher - p.fields.higher), 1e-9);
  EXPECT_LE(fl_residual(set, wave, f), 1e-10);
  EXPECT_LE(f.iterations, 15);
}

INSTANTIATE_TEST_SUITE_P(Orders, NonlinearVsPicard,
                         ::testing::Values(Nonlinearity::quadratic, Nonlinearity::cubic));

TEST(NonlinearFoldyLax, WrongSetKind) {
  const auto wave = IncidentWave::from_angle(2.0, 0.0);
  EXPECT_THROW(solve_quadratic_fl(linear_set({{0, 0}}, 0.5), wave), UsageError);
  EXPECT_THROW(solve_cubic_fl(nonlinear_set(Nonlinearity::quadratic, {{0, 0}}, 0.5, 0.4), wave),
               UsageError);
}

TEST(ScatteredFieldFL, Basics) {
  const auto set = linear_set({{0, 0}, {2, 0}}, 0.5);
  ExternalFields zero{Nonlinearity::linear, cvec::Zero(2), {}, 0};
  EXPECT_EQ(scattered_field_fl(set, zero, {1, 1}, 1, 3.0), cplx(0.0));

  const auto one = linear_set({{0.5, 0.5}}, 0.7);
  ExternalFields f1{Nonlinearity::linear, cvec::Constant(1, cplx(0.3, -0.2)), {}, 0};
  EXPECT_LE(std::abs(scattered_field_fl(one, f1, {2, 1}, 1, 3.0) -
                     0.7 * cplx(0.3, -0.2) * green(3.0, {2, 1}, {0.5, 0.5})),
            1e-16);

  // Superposition: switching one scatterer off leaves the other's field.
  auto two = linear_set({{0.5, 0.5}, {-1.0, 2.0}}, 0.7);
  two.coefficients[1].lin1 = 0.0;
  ExternalFields f2{Nonlinearity::linear, cvec::Constant(2, cplx(0.3, -0.2)), {}, 0};
  EXPECT_LE(std::abs(scattered_field_fl(two, f2, {2, 1}, 1, 3.0) -
                     scattered_field_fl(one, f1, {2, 1}, 1, 3.0)),
            1e-16);
  EXPECT_THROW(scattered_field_fl(one, f1, {0.5, 0.5}, 1, 3.0), SingularityError);
}

TEST(TrustRegion, SolvesSmallNonlinearSystem) {
  // x^2 + y^2 = 4, x y = 1, started far from the root.
  auto eval = [](const rvec& x, rvec& F, rmat* J) {
    F.resize(2);
    F << x[0] * x[0] + x[1] * x[1] - 4.0, x[0] * x[1] - 1.0;
    if (J) {
      J->resize(2, 2);
      *J << 2 * x[0], 2 * x[1], x[1], x[0];
    }
  };
  rvec x0(2);
  x0 << 10.0, 0.5;
  const auto r = trust_region_solve(eval, x0);
  rvec F;
  eval(r.x, F, nullptr);
  EXPECT_LE(F.lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(TrustRegion, ReportsNonConvergence) {
  // x^2 + 1 = 0 has no real root.
  auto eval = [](const rvec& x, rvec& F, rmat* J) {
    F.resize(1);
    F[0] = x[0] * x[0] + 1.0;
    if (J) {
      J->resize(1, 1);
      (*J)(0, 0) = 2.0 * x[0];
    }
  };
  TrustRegionOptions opt;
  opt.max_iterations = 20;
  try {
    trust_region_solve(eval, rvec::Constant(1, 0.3), opt);
    FAIL() << "expected a convergence error";
  } catch (const ConvergenceError& e) {
    EXPECT_GE(e.last_residual, 1.0);
  }
}
