#include <random>

#include <gtest/gtest.h>

#include "fdim/validation.hpp"

using namespace fdi;

namespace {

struct Sources {
  rvec xi, eta;
  cvec c;
};

Sources random_sources(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> f(-pi, pi), a(-1.0, 1.0);
  Sources s{rvec(n), rvec(n), cvec(n)};
  for (int j = 0; j < n; ++j) {
    s.xi[j] = f(rng);
    s.eta[j] = f(rng);
    s.c[j] = cplx(a(rng), a(rng));
  }
  return s;
}

double rel_err(const cvec& a, const cvec& b) { return inf_norm(a - b) / inf_norm(b); }

}  // namespace

TEST(Nufft1d, ConstantMode) {
  const cvec f = nufft1d_type1(rvec::Zero(1), cvec::Constant(1, cplx(2.0, -1.0)), 32);
  // Errors are measured against the l1 norm of the coefficients.
  const double c1 = std::abs(cplx(2.0, -1.0));
  for (int i = 0; i < 32; ++i) EXPECT_LE(std::abs(f[i] - cplx(2.0, -1.0)) / c1, 1e-10);
}

TEST(Nufft1d, GridFrequenciesMatchDft) {
  const int m = 64;
  rvec xi(5);
  xi << 0.0, two_pi / m, -two_pi * 7 / m, two_pi * 20 / m, -pi;
  cvec c(5);
  c << 1.0, cplx(0, 1), -0.5, cplx(0.3, 0.2), 2.0;
  EXPECT_LE(rel_err(nufft1d_type1(xi, c, m), direct_sum_1d(xi, c, m)), 1e-10);
}

TEST(Nufft1d, RandomSourcesMatchDirectSum) {
  const auto s = random_sources(1000, 11);
  for (int m : {512, 100, 2})
    EXPECT_LE(rel_err(nufft1d_type1(s.xi, s.c, m), direct_sum_1d(s.xi, s.c, m)), 1e-10) << m;
}

TEST(Nufft1d, Linearity) {
  const auto a = random_sources(300, 1), b = random_sources(300, 2);
  const cplx alpha(0.7, -1.3);
  const cvec lhs = nufft1d_type1(a.xi, cvec(a.c + alpha * b.c), 128);
  const cvec rhs = nufft1d_type1(a.xi, a.c, 128) + alpha * nufft1d_type1(a.xi, b.c, 128);
  EXPECT_LE(inf_norm(lhs - rhs) / inf_norm(rhs), 1e-12);
}

TEST(Nufft1d, Errors) {
  rvec xi(1);
  xi << 3.2;
  EXPECT_THROW(nufft1d_type1(xi, cvec::Ones(1), 16), DomainError);
  EXPECT_THROW(nufft1d_type1(rvec(0), cvec(0), 16), DomainError);
  EXPECT_THROW(nufft1d_type1(rvec::Zero(2), cvec::Ones(1), 16), UsageError);
  EXPECT_THROW(nufft1d_type1(rvec::Zero(1), cvec::Ones(1), 15), DomainError);
}

TEST(Nufft2d, ConstantMode) {
  const cmat F = nufft2d_type1(rvec::Zero(1), rvec::Zero(1), cvec::Ones(1), 24);
  EXPECT_LE((F - cmat::Ones(24, 24)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Nufft2d, SeparableOuterProduct) {
  // A single source factorizes into the product of two 1D transforms.
  const int m = 48;
  rvec xi(1), eta(1);
  xi << 1.234;
  eta << -2.5;
  const cmat F = nufft2d_type1(xi, eta, cvec::Ones(1), m);
  const cvec fx = nufft1d_type1(xi, cvec::Ones(1), m), fy = nufft1d_type1(eta, cvec::Ones(1), m);
  const cmat outer = fx * fy.transpose();
  EXPECT_LE((F - outer).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Nufft2d, RandomSourcesSpotChecks) {
  const auto s = random_sources(10000, 5);
  const int m = 500;
  const cmat F = nufft2d_type1(s.xi, s.eta, s.c, m);
  std::mt19937_64 rng(9);
  double num = 0.0, den = 0.0;
  for (int q = 0; q < 40; ++q) {
    const int ix = int(rng() % m), iy = int(rng() % m);
    const cplx ref = direct_sum_2d(s.xi, s.eta, s.c, m, ix, iy);
    num = std::max(num, std::abs(F(ix, iy) - ref));
    den = std::max(den, std::abs(ref));
  }
  EXPECT_LE(num / den, 1e-10);
}

TEST(Nufft2d, HermitianSymmetricSourcesGiveRealOutput) {
  auto s = random_sources(200, 3);
  const int n = 200;
  Sources h{rvec(2 * n), rvec(2 * n), cvec(2 * n)};
  h.xi << s.xi, -s.xi;
  h.eta << s.eta, -s.eta;
  h.c << s.c, s.c.conjugate();
  const cmat F = nufft2d_type1(h.xi, h.eta, h.c, 64);
  EXPECT_LE(F.imag().cwiseAbs().maxCoeff() / F.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Nufft2d, Errors) {
  rvec bad(1);
  bad << -3.5;
  EXPECT_THROW(nufft2d_type1(rvec::Zero(1), bad, cvec::Ones(1), 16), DomainError);
  EXPECT_THROW(nufft2d_type1(rvec::Zero(1), rvec::Zero(2), cvec::Ones(1), 16), UsageError);
}

TEST(Nufft, ThreadCountDoesNotChangeResult) {
  const auto s = random_sources(20000, 21);
  const int before = max_threads();
  set_threads(1);
  const cmat a = nufft2d_type1(s.xi, s.eta, s.c, 64);
  set_threads(std::max(before, 2));
  const cmat b = nufft2d_type1(s.xi, s.eta, s.c, 64);
  set_threads(before);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff(), 1e-13);
}
