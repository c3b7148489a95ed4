#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jetscope/error.hpp"
#include "jetscope/whitney.hpp"

using namespace jetscope;
using namespace jetscope::whitney;

namespace {

constexpr double kKappa = 0.9;

std::vector<char> single_point_mask(const Grid& g, const Point& p) {
  std::vector<char> mask(g.size(), 0);
  const auto c = g.nearest(p);
  mask[g.index(c[0], c[1])] = 1;
  return mask;
}

}  // namespace

TEST(HValue, Examples) {
  EXPECT_DOUBLE_EQ(h_value(0.4, 1.0), 0.03);
  EXPECT_DOUBLE_EQ(h_value(0.4, 0.1), 0.02);
  EXPECT_DOUBLE_EQ(h_value(0.0, 0.1), 0.005);
  EXPECT_DOUBLE_EQ(h_value(3.0, 0.1), 0.05);
  EXPECT_DOUBLE_EQ(h_value(0.0, 5.0), 0.05);
}

TEST(HValue, IndependentOfDeltaBeyondDelta) {
  for (double d : {0.2, 0.5, 0.9})
    for (double delta : {0.05, 0.1, 0.19}) EXPECT_DOUBLE_EQ(h_value(d, delta), std::min(1.0, d) / 20.0);
}

TEST(PointSet, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(Point{u(rng), 0.3 * u(rng)});
  const PointSet set(2, pts);
  for (int q = 0; q < 500; ++q) {
    const Point x{2.0 * u(rng), 2.0 * u(rng)};
    double best = 1e300;
    for (const auto& p : pts) best = std::min(best, std::hypot(p[0] - x[0], p[1] - x[1]));
    const auto [idx, dist] = set.nearest(x);
    EXPECT_DOUBLE_EQ(dist, best);
    EXPECT_DOUBLE_EQ(std::hypot(pts[idx][0] - x[0], pts[idx][1] - x[1]), best);
  }
}

TEST(PointSet, EmptyQueryFails) {
  const PointSet set(1, {});
  try {
    set.nearest(Point{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySet);
  }
}

TEST(Cover, EmptySetRejected) {
  const Grid g = Grid::line(-1.0, 1.0, 101);
  try {
    build_cover(g, std::vector<char>(g.size(), 0), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySet);
  }
}

TEST(Cover, WholeGridGivesUniformRadius) {
  const Grid g = Grid::line(-1.0, 1.0, 401);
  const auto cover = build_cover(g, std::vector<char>(g.size(), 1), 0.2);
  for (double h : cover.h) EXPECT_DOUBLE_EQ(h, 0.01);
  for (double r : cover.radii) EXPECT_DOUBLE_EQ(r, 0.01);
  EXPECT_TRUE(verify_cover(cover).pass());
}

TEST(Cover, InvariantsInOneDimension) {
  const Grid g = Grid::line(-1.0, 1.0, 8001);
  const auto cover = build_cover(g, single_point_mask(g, Point{}), 0.05);
  const auto rep = verify_cover(cover);
  EXPECT_TRUE(rep.pass());
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(cover.dist[k], std::abs(g.point(k)[0]), 1e-12);
    if (cover.dist[k] > cover.delta) EXPECT_DOUBLE_EQ(cover.h[k], std::min(1.0, cover.dist[k]) / 20.0);
  }
  // Disjoint balls: pairwise separation by the sum of radii.
  for (std::size_t s = 0; s < cover.centers.size(); ++s)
    for (std::size_t t = s + 1; t < cover.centers.size(); ++t)
      EXPECT_GT(std::abs(cover.centers[s][0] - cover.centers[t][0]), cover.radii[s] + cover.radii[t]);
}

TEST(Cover, InvariantsInTwoDimensions) {
  const Grid g(2, Point{-0.25, -0.25}, Point{0.25, 0.25}, {129, 129});
  auto mask = single_point_mask(g, Point{0.0, 0.0});
  mask[g.index(90, 70)] = 1;
  const auto cover = build_cover(g, mask, 0.1);
  EXPECT_TRUE(verify_cover(cover).pass());
  EXPECT_EQ(cover.a.size(), 2u);
  // Every node lies within 5h of a center.
  for (std::size_t k = 0; k < g.size(); k += 37) {
    const Point x = g.point(k);
    bool covered = false;
    for (std::size_t s = 0; s < cover.centers.size() && !covered; ++s)
      covered = std::hypot(x[0] - cover.centers[s][0], x[1] - cover.centers[s][1]) <= 5.0 * cover.h[k] + 1e-12;
    EXPECT_TRUE(covered) << k;
  }
}

TEST(Cover, CsvLayout) {
  const Grid g = Grid::line(-1.0, 1.0, 201);
  const auto cover = build_cover(g, single_point_mask(g, Point{}), 0.1);
  const std::string csv = cover_csv(cover);
  EXPECT_EQ(csv.rfind("center,radius\r\n", 0), 0u);
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) ++lines;
  EXPECT_EQ(lines, cover.centers.size() + 1);
}

TEST(Partition, SumsToOneNearSet) {
  const Grid g = Grid::line(-1.0, 1.0, 20001);
  const auto cover = build_cover(g, single_point_mask(g, Point{}), kKappa / 18.0);
  const PartitionOfUnity pou(cover, kKappa, 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-kKappa / 18.0, kKappa / 18.0);
  for (int q = 0; q < 2000; ++q) {
    const Point x{u(rng), 0.0};
    EXPECT_NEAR(pou.sum(x), 1.0, 1e-10);
    double total = 0.0;
    for (const auto& [s, w] : pou.weights(x)) {
      EXPECT_GE(w, 0.0);
      EXPECT_LT(std::abs(x[0] - cover.centers[s][0]), 10.0 * cover.radii[s]);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
  EXPECT_LE(pou.max_active(), 129u);
  ASSERT_EQ(pou.derivative_constants().size(), 3u);
  EXPECT_GT(pou.derivative_constants()[0], 0.0);
  EXPECT_LE(pou.derivative_constants()[0], 1.0 + 1e-12);
}

TEST(Partition, DerivativeConstantsStableUnderDelta) {
  const Grid g = Grid::line(-1.0, 1.0, 40001);
  const auto mask = single_point_mask(g, Point{});
  const auto c1 = build_cover(g, mask, kKappa / 18.0);
  const auto c2 = build_cover(g, mask, kKappa / 36.0);
  const PartitionOfUnity p1(c1, kKappa, 2), p2(c2, kKappa, 2);
  const double v1 = p1.derivative_constants()[1], v2 = p2.derivative_constants()[1];
  EXPECT_GT(v1, 0.0);
  EXPECT_NEAR(v2 / v1, 1.0, 0.2);
}

namespace {

struct GlueSetup {
  Grid grid = Grid::line(-1.0, 1.0, 4001);
  std::vector<char> mask = single_point_mask(grid, Point{});
  GlueParams params;

  GlueSetup() {
    params.kappa = kKappa;
    params.lambda = 1.5;
    params.i = 1;
    params.p = 2.0;
    params.m_bound = 10.0;
    params.gamma = 10.0;
    params.deltas = {kKappa / 18.0, kKappa / 72.0};
    for (int m = 0; m < 3; ++m) params.radii.push_back(kKappa / 72.0 * std::ldexp(1.0, -m));
  }
};

}  // namespace

TEST(Glue, LocalDataEqualToFieldReproducesIt) {
  GlueSetup s;
  const auto u = SampledField::sample(s.grid, [](const Point& x) { return std::cos(x[0]) + x[0]; });
  const auto res = glue(u, s.mask, [&](const Point&, double) { return u; }, s.params);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(res.v[k], u[k], 1e-12);
}

TEST(Glue, LinearInData) {
  GlueSetup s;
  const auto u = SampledField::sample(s.grid, [](const Point& x) { return std::pow(std::abs(x[0]), 2.5); });
  const auto local = [&](const Point& a, double r) {
    return u.map([&](const Point& x, double v) { return std::abs(x[0] - a[0]) < r ? v - 0.1 * (r - std::abs(x[0] - a[0])) : v; });
  };
  const auto base = glue(u, s.mask, local, s.params);
  const auto doubled = glue(u * 2.0, s.mask, [&](const Point& a, double r) { return local(a, r) * 2.0; }, s.params);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(doubled.v[k], 2.0 * base.v[k], 1e-12);
  // Away from A the glued field is u itself.
  for (std::size_t k = 0; k < u.size(); ++k)
    if (std::abs(s.grid.point(k)[0]) > kKappa / 18.0 + 1e-9) EXPECT_EQ(base.v[k], u[k]);
}

TEST(Glue, HypothesisBoundEnforced) {
  GlueSetup s;
  s.params.m_bound = 1e-6;
  const auto u = SampledField::sample(s.grid, [](const Point& x) { return std::pow(std::abs(x[0]), 2.5); });
  try {
    glue(u, s.mask, [&](const Point&, double) { return SampledField::zeros(s.grid); }, s.params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisUnverified);
  }
}
