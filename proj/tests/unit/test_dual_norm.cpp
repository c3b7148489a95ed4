#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "jetscope/error.hpp"
#include "jetscope/norms.hpp"

using namespace jetscope;
using namespace jetscope::norms;

namespace {

const Grid& line4k() {
  static const Grid g = Grid::line(-1.0, 1.0, 4097);
  return g;
}

DistributionRep constant(double c) {
  return DistributionRep::from_field(SampledField::sample(line4k(), [c](const Point&) { return c; }));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(DualNorm, OrderZeroEqualsLp) {
  const auto f = SampledField::sample(line4k(), [](const Point& x) { return std::cos(3.0 * x[0]); });
  const Ball unit(Point{}, 1.0, true);
  const auto t = DistributionRep::from_field(f);
  for (double p : {1.5, 2.0, 3.0}) {
    const double direct = lp_norm(f, unit, p);
    EXPECT_LE(rel(dual_norm(t, unit, NormSpec(0, p), DualMethod::Optimization), direct), 1e-4) << "p=" << p;
  }
  EXPECT_LE(rel(dual_norm(t, unit, NormSpec(0, 2.0), DualMethod::Riesz), lp_norm(f, unit, 2.0)), 1e-10);
}

TEST(DualNorm, OrderZeroCertifiesGap) {
  const auto f = SampledField::sample(line4k(), [](const Point& x) { return x[0] - 0.2; });
  const auto res = dual_norm_detailed(DistributionRep::from_field(f), Ball(Point{}, 0.8), NormSpec(0, 1.5),
                                      DualMethod::Optimization);
  EXPECT_GE(res.upper, res.value);
  EXPECT_LE(res.gap, 1e-4);
}

TEST(DualNorm, ConstantAtOrderOne) {
  // sup ∫θ over ‖θ'‖₂ ≤ 1 on (−r, r) equals ‖u'‖₂ for u'' = −1, u(±r) = 0.
  for (double r : {0.5, 1.0}) {
    const double exact = std::sqrt(2.0 * r * r * r / 3.0);
    const Ball s(Point{}, r);
    EXPECT_LE(rel(dual_norm(constant(1.0), s, NormSpec(1, 2.0), DualMethod::Riesz), exact), 1e-3) << r;
    EXPECT_LE(rel(dual_norm(constant(1.0), s, NormSpec(1, 2.0), DualMethod::Optimization), exact), 1e-3) << r;
  }
}

TEST(DualNorm, DiracAtOrderOne) {
  const auto delta = DistributionRep::dirac(1, Point{});
  for (double r : {0.125, 0.25, 0.5}) {
    const Ball s(Point{}, r);
    const double exact = std::sqrt(r / 2.0);
    EXPECT_LE(rel(dual_norm(delta, line4k(), s, NormSpec(1, 2.0), DualMethod::Riesz), exact), 0.02);
    EXPECT_LE(rel(dual_norm(delta, line4k(), s, NormSpec(1, 2.0), DualMethod::Optimization), exact), 0.02);
  }
}

TEST(DualNorm, AbsolutelyHomogeneous) {
  const Ball s(Point{0.1, 0.0}, 0.6);
  const double base = dual_norm(constant(1.0), s, NormSpec(1, 2.0));
  EXPECT_NEAR(dual_norm(constant(-3.0), s, NormSpec(1, 2.0)), 3.0 * base, 1e-10 * base);
}

TEST(DualNorm, MonotoneInRegion) {
  const auto t = DistributionRep::from_field(
      SampledField::sample(line4k(), [](const Point& x) { return std::sin(5.0 * x[0]); }));
  double prev = 0.0;
  for (double r : {0.2, 0.4, 0.8}) {
    const double v = dual_norm(t, Ball(Point{}, r), NormSpec(1, 2.0));
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(DualNorm, RoutesAgreeInTwoDimensions) {
  const Grid g = Grid::square(-1.0, 1.0, 65);
  const auto t = DistributionRep::from_field(
      SampledField::sample(g, [](const Point& x) { return std::cos(2.0 * x[0]) * (1.0 + x[1]); }));
  const Ball s(Point{0.1, -0.1}, 0.6);
  const double riesz = dual_norm(t, s, NormSpec(1, 2.0), DualMethod::Riesz);
  const double opt = dual_norm(t, s, NormSpec(1, 2.0), DualMethod::Optimization);
  EXPECT_LE(rel(opt, riesz), 0.02);
}

TEST(DualNorm, RoutesAgreeAtOrderTwo) {
  const Grid g = Grid::line(-1.0, 1.0, 1025);
  const auto t = DistributionRep::from_field(SampledField::sample(g, [](const Point& x) { return 1.0 + x[0]; }));
  const Ball s(Point{}, 0.7);
  const double riesz = dual_norm(t, s, NormSpec(2, 2.0), DualMethod::Riesz);
  const double opt = dual_norm(t, s, NormSpec(2, 2.0), DualMethod::Optimization);
  EXPECT_LE(rel(opt, riesz), 0.02);
}

TEST(DualNorm, UnsupportedExponents) {
  const Ball s(Point{}, 0.5);
  const auto expect_code = [](auto&& fn) {
    try {
      fn();
      ADD_FAILURE() << "expected UnsupportedExponent";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::UnsupportedExponent);
    }
  };
  expect_code([&] { dual_norm(constant(1.0), s, NormSpec(1, 3.0), DualMethod::Riesz); });
  expect_code([&] { dual_norm(constant(1.0), s, NormSpec(1, 1.0), DualMethod::Optimization); });
  expect_code([&] { NormSpec(0, 0.9); });
}

TEST(DualNorm, NeedsGridForPureAtoms) {
  try {
    dual_norm(DistributionRep::dirac(1, Point{}), Ball(Point{}, 0.5), NormSpec(1, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDerivativeData);
  }
}

TEST(DualNorm, DerivativeShiftProperty) {
  const Grid g = Grid::line(-1.0, 1.0, 1025);
  for (int m = 1; m <= 3; ++m) {
    const auto f = SampledField::sample(g, [m](const Point& x) { return std::sin(m * 2.0 * x[0]) + 0.5; });
    for (int k = 1; k <= 2; ++k) EXPECT_TRUE(verify_derivative_shift(f, Ball(Point{0.1, 0.0}, 0.6), k, 2.0).pass());
  }
}
