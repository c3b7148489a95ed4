#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "jetscope/error.hpp"
#include "jetscope/norms.hpp"
#include "oracles.hpp"

using namespace jetscope;
using namespace jetscope::norms;

namespace {

const Ball kUnit(Point{}, 1.0, true);

SampledField on_line(int n, double (*fn)(double)) {
  return SampledField::sample(Grid::line(-1.0, 1.0, n), [fn](const Point& x) { return fn(x[0]); });
}

}  // namespace

TEST(Conjugate, Values) {
  EXPECT_DOUBLE_EQ(conjugate(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate(1.5), 3.0);
  EXPECT_DOUBLE_EQ(conjugate(4.0), 4.0 / 3.0);
  EXPECT_TRUE(std::isinf(conjugate(1.0)));
  EXPECT_DOUBLE_EQ(conjugate(std::numeric_limits<double>::infinity()), 1.0);
}

TEST(Conjugate, RejectsBelowOne) {
  try {
    NormSpec bad(1, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedExponent);
  }
}

TEST(TensorNorm, Examples) {
  const double v1[] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(tensor_norm(2, 1, v1), 5.0);
  // The mixed second derivative appears twice in the full tensor.
  const double v2[] = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(tensor_norm(2, 2, v2), std::sqrt(1.0 + 2.0 * 4.0 + 9.0));
  const double v3[] = {-2.0};
  EXPECT_DOUBLE_EQ(tensor_norm(1, 5, v3), 2.0);
}

TEST(LpNorm, ClosedForms) {
  const auto one = on_line(4097, [](double) { return 1.0; });
  EXPECT_NEAR(lp_norm(one, kUnit, 2.0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(lp_norm(one, kUnit, 1.0), 2.0, 1e-12);
  const auto x = on_line(4097, [](double t) { return t; });
  EXPECT_NEAR(lp_norm(x, kUnit, 2.0), std::sqrt(2.0 / 3.0), 1e-6);
  EXPECT_NEAR(lp_norm(x, kUnit, 3.0), std::pow(0.5, 1.0 / 3.0), 1e-6);
  EXPECT_DOUBLE_EQ(lp_norm(x, kUnit, std::numeric_limits<double>::infinity()), 1.0);
}

TEST(LpNorm, MatchesQuadratureOracle) {
  const auto f = on_line(8193, [](double t) { return std::cos(3.0 * t) + 0.3 * t; });
  for (double p : {1.5, 2.0, 4.0}) {
    const double ref = std::pow(
        oracle::integrate([p](double t) { return std::pow(std::abs(std::cos(3.0 * t) + 0.3 * t), p); }, -1.0, 1.0),
        1.0 / p);
    EXPECT_NEAR(lp_norm(f, kUnit, p), ref, 1e-5 * ref) << "p=" << p;
  }
}

TEST(LpNorm, EmptyRegion) {
  const auto f = on_line(9, [](double t) { return t; });
  try {
    lp_norm(f, Ball(Point{0.1, 0.0}, 0.05), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRegion);
  }
}

TEST(LpNorm, TriangleInequalityProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g = Grid::line(-1.0, 1.0, 513);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = u(rng) * 4, b = u(rng) * 4, c = u(rng);
    const auto f = SampledField::sample(g, [&](const Point& x) { return std::sin(a * x[0]) + c; });
    const auto h = SampledField::sample(g, [&](const Point& x) { return std::cos(b * x[0]) * x[0]; });
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_LE(lp_norm(f + h, kUnit, p), lp_norm(f, kUnit, p) + lp_norm(h, kUnit, p) + 1e-12);
      EXPECT_NEAR(lp_norm(f * 2.5, kUnit, p), 2.5 * lp_norm(f, kUnit, p), 1e-12);
    }
  }
}

TEST(SobolevSeminorm, BumpL2MatchesOracle) {
  const double ref = std::sqrt(oracle::integrate([](double t) { return oracle::bump(t) * oracle::bump(t); }, -1.0, 1.0));
  EXPECT_NEAR(sobolev_seminorm(TestFunction::standard(1), NormSpec(0, 2.0)), ref, 1e-9);
}

TEST(SobolevSeminorm, FirstDerivativeMatchesOracle) {
  // Φ'(t) = −2t/(1−t²)² Φ(t)
  const auto dphi = [](double t) {
    const double s = 1.0 - t * t;
    return s > 0.0 ? -2.0 * t / (s * s) * oracle::bump(t) : 0.0;
  };
  const double ref = std::pow(oracle::integrate([&](double t) { return std::pow(std::abs(dphi(t)), 1.5); }, -1.0, 1.0),
                              1.0 / 1.5);
  EXPECT_NEAR(sobolev_seminorm(TestFunction::standard(1), NormSpec(1, 1.5)), ref, 1e-7 * ref);
}

TEST(SobolevSeminorm, ScalingLaw) {
  const auto phi = TestFunction::standard(1);
  const auto small = phi.rescaled(Point{0.3, 0.0}, 0.25);
  for (int i = 0; i <= 2; ++i) {
    const double p = 2.0;
    // ν_{i,p}(θ(·/r)) = r^{n/p − i} ν_{i,p}(θ)
    EXPECT_NEAR(sobolev_seminorm(small, NormSpec(i, p)),
                std::pow(0.25, 0.5 - i) * sobolev_seminorm(phi, NormSpec(i, p)),
                1e-8 * sobolev_seminorm(small, NormSpec(i, p)));
  }
}

TEST(PoincarePolynomial, Examples) {
  const auto sq = on_line(4097, [](double t) { return t * t; });
  const Jet p1 = poincare_polynomial(sq, kUnit, 1);
  EXPECT_EQ(p1.degree(), 0);
  EXPECT_NEAR(p1.coeff(MultiIndex::of(0)), 1.0 / 3.0, 1e-6);

  const Jet p2 = poincare_polynomial(sq, kUnit, 2);
  EXPECT_NEAR(p2.coeff(MultiIndex::of(1)), 0.0, 1e-9);
  EXPECT_NEAR(p2.coeff(MultiIndex::of(0)), 1.0 / 3.0, 1e-6);

  const Jet p3 = poincare_polynomial(sq, kUnit, 3);
  EXPECT_NEAR(p3.coeff(MultiIndex::of(2)), 2.0, 1e-6);
  EXPECT_NEAR(p3.coeff(MultiIndex::of(1)), 0.0, 1e-6);
  EXPECT_NEAR(p3.coeff(MultiIndex::of(0)), 0.0, 1e-6);

  EXPECT_EQ(poincare_polynomial(sq, kUnit, 0).degree(), -1);
}

TEST(PoincarePolynomial, ReproducesPolynomialsBelowOrder) {
  const Grid g = Grid::square(-1.0, 1.0, 129);
  const Ball s(Point{0.1, -0.2}, 0.6);
  const auto f = SampledField::sample(g, [](const Point& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1]; });
  const Jet p = poincare_polynomial(f, s, 3);
  for (const Point& x : {Point{0.1, -0.2}, Point{0.4, 0.0}, Point{-0.3, -0.5}})
    EXPECT_NEAR(p(x), 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1], 1e-6);
}

TEST(Verifiers, PoincarePassesOnSmoothFields) {
  const auto f = on_line(2049, [](double t) { return std::sin(4.0 * t) + t * t * t; });
  for (int k = 1; k <= 3; ++k)
    for (double p : {1.5, 2.0, 3.0}) {
      const auto rep = verify_poincare(f, Ball(Point{0.2, 0.0}, 0.5), k, p);
      EXPECT_TRUE(rep.pass()) << "k=" << k << " p=" << p;
      EXPECT_EQ(rep.checks.size(), static_cast<std::size_t>(k));
    }
}

TEST(Verifiers, ZeroBoundaryPoincare) {
  const Ball s(Point{0.1, 0.0}, 0.4);
  const auto theta = TestFunction::bump(1, Point{0.15, 0.0}, 0.3);
  for (int k = 0; k <= 3; ++k)
    for (int j = 0; j <= k; ++j) EXPECT_TRUE(verify_zero_boundary_poincare(theta, s, k, j, 2.0).pass());
  try {
    verify_zero_boundary_poincare(TestFunction::bump(1, Point{0.4, 0.0}, 0.3), s, 1, 0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportViolation);
  }
}

TEST(Verifiers, InterpolationOnTrigFamily) {
  std::vector<FamilyMember> family;
  for (int m = 1; m <= 4; ++m) family.push_back([m](const Point& x) { return std::sin(m * x[0]); });
  const auto res = verify_interpolation(family, Grid::line(-1.0, 1.0, 513), Ball(Point{}, 0.9), 1, 2, 2.0, 0.5);
  EXPECT_TRUE(res.report.pass());
  EXPECT_GE(res.c_coarse, 0.0);
  EXPECT_NEAR(res.c_coarse, res.c_fine, 0.05 * std::max(1.0, res.c_fine));
}

TEST(Verifiers, DerivativeShift) {
  const auto f = on_line(1025, [](double t) { return std::cos(2.0 * t) + t; });
  EXPECT_TRUE(verify_derivative_shift(f, Ball(Point{}, 0.7), 1, 2.0).pass());
}
