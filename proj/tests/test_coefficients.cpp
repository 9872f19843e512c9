#include <gtest/gtest.h>

#include "fdim/coefficients.hpp"

using namespace fdi;

TEST(Coefficients, LinearNormalization) {
  for (double k : {0.5, 3.0, 10.0}) {
    SusceptibilitySet s;
    s.set({1}, 1.0 / (4.0 * pi * k * k));
    const auto c = coefficients_from_susceptibilities(
        s, HarmonicSet::for_nonlinearity(k, Nonlinearity::linear), Nonlinearity::linear);
    EXPECT_NEAR(c.lin1, 1.0, 1e-15);
    EXPECT_EQ(c.nl1, 0.0);
  }
}

TEST(Coefficients, MissingSusceptibilitiesAreZero) {
  const auto c = coefficients_from_susceptibilities(
      {}, HarmonicSet::for_nonlinearity(2.0, Nonlinearity::cubic), Nonlinearity::cubic);
  EXPECT_EQ(c.lin1, 0.0);
  EXPECT_EQ(c.lin2, 0.0);
  EXPECT_EQ(c.nl1, 0.0);
  EXPECT_EQ(c.nl2, 0.0);
  EXPECT_EQ(c.nl3, 0.0);
}

TEST(Coefficients, QuadraticMixing) {
  SusceptibilitySet s;
  s.set({-1, 2}, 0.01).set({1, 1}, 0.02).set({2}, 0.03);
  const double k = 2.0;
  const auto c = coefficients_from_susceptibilities(
      s, HarmonicSet::for_nonlinearity(k, Nonlinearity::quadratic), Nonlinearity::quadratic);
  EXPECT_NEAR(c.nl1, 1.0053096491487339, 1e-14);
  EXPECT_NEAR(c.nl2, 4.0 * pi * 16.0 * 0.02, 1e-13);
  EXPECT_NEAR(c.lin2, 4.0 * pi * 16.0 * 0.03, 1e-13);
}

TEST(Coefficients, CubicMixing) {
  SusceptibilitySet s;
  s.set({1, 1, -1}, 0.01).set({3, -1, -1}, 0.02).set({1, 1, 1}, 0.03);
  const double k = 1.5;
  const auto c = coefficients_from_susceptibilities(
      s, HarmonicSet::for_nonlinearity(k, Nonlinearity::cubic), Nonlinearity::cubic);
  EXPECT_NEAR(c.nl1, 12.0 * pi * k * k * 0.01, 1e-14);
  EXPECT_NEAR(c.nl2, 12.0 * pi * k * k * 0.02, 1e-14);
  EXPECT_NEAR(c.nl3, 4.0 * pi * 9.0 * k * k * 0.03, 1e-13);
}

TEST(Coefficients, ArgumentOrderIrrelevant) {
  SusceptibilitySet s;
  s.set({2, -1}, 0.5);
  EXPECT_EQ(s.get({-1, 2}), 0.5);
  EXPECT_TRUE(s.has({-1, 2}));
  EXPECT_FALSE(s.has({1, 1}));
}

TEST(Coefficients, ScaleWithSquaredWavenumber) {
  SusceptibilitySet s;
  s.set({1}, 0.1);
  auto lin = [&](double k) {
    return coefficients_from_susceptibilities(
               s, HarmonicSet::for_nonlinearity(k, Nonlinearity::linear), Nonlinearity::linear)
        .lin1;
  };
  EXPECT_NEAR(lin(3.0) / lin(1.0), 9.0, 1e-13);
}
