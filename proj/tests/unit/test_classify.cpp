#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "jetscope/classify.hpp"
#include "jetscope/signals.hpp"

using namespace jetscope;
using namespace jetscope::classify;

namespace {

const Grid& grid() {
  static const Grid g = Grid::line(-1.0, 1.0, 16385);
  return g;
}

DistributionRep signal(const std::string& name) {
  return DistributionRep::from_field(make_signal(parse_signal(name), grid()));
}

OrderReport classify_signal(const std::string& name, int k_max = 3, const norms::NormSpec& spec = {0, 2.0},
                              double r0 = 0.125) {
  return classify_point(signal(name), Point{}, k_max, spec, dyadic_ladder(r0, 7));
}

}  // namespace

TEST(Ladder, Dyadic) {
  const auto l = dyadic_ladder(0.5, 4);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_DOUBLE_EQ(l[0], 0.5);
  EXPECT_DOUBLE_EQ(l[3], 0.0625);
}

TEST(Ladder, AdmissibleStopsAtResolution) {
  // Spacing 1/2048: the finest ball must span 32 spacings, so r ≥ 1/128.
  const auto l = admissible_ladder(Grid::line(-1.0, 1.0, 4097), 0.125);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_DOUBLE_EQ(l.back(), 1.0 / 128.0);
  EXPECT_EQ(admissible_ladder(Grid::line(-1.0, 1.0, 4097), 0.125, 3).size(), 3u);
}

TEST(Ladder, NormalizationExponent) {
  EXPECT_DOUBLE_EQ(normalization_exponent(1, norms::NormSpec(0, 2.0), 1), 1.5);
  EXPECT_DOUBLE_EQ(normalization_exponent(2, norms::NormSpec(1, 2.0), 0), 2.0);
  EXPECT_DOUBLE_EQ(normalization_exponent(1, norms::NormSpec(1, 3.0), -1), 1.0 / 1.5);
}

TEST(Profile, AbsoluteValuePlateau) {
  const auto ladder = dyadic_ladder(0.125, 5);
  const auto prof = residual_profile(signal("absx"), Point{}, 0, norms::NormSpec(0, 2.0), ladder);
  ASSERT_EQ(prof.rows.size(), ladder.size());
  for (const auto& row : prof.rows) {
    EXPECT_LE(std::abs(row.raw - std::sqrt(std::pow(row.r, 3) / 6.0)) / row.raw, 1e-3);
    EXPECT_NEAR(row.normalized, std::pow(row.r, -normalization_exponent(1, norms::NormSpec(0, 2.0), 0)) * row.raw,
                1e-12 * row.normalized);
  }
}

TEST(Profile, SharedProfilesMatchSingle) {
  const auto ladder = dyadic_ladder(0.125, 4);
  const auto t = signal("xabsx");
  const auto all = residual_profiles(t, Point{}, 2, norms::NormSpec(0, 2.0), ladder);
  ASSERT_EQ(all.size(), 4u);
  const auto one = residual_profile(t, Point{}, 1, norms::NormSpec(0, 2.0), ladder);
  for (std::size_t m = 0; m < ladder.size(); ++m)
    EXPECT_NEAR(all[2].rows[m].raw, one.rows[m].raw, 1e-9 * one.rows[m].raw);
}

TEST(Trend, SlopeOfGeometricSequence) {
  EXPECT_NEAR(trend_slope({1.0, 0.5, 0.25, 0.125, 0.0625}, 4), -1.0, 1e-12);
  EXPECT_NEAR(trend_slope({3.0, 3.0, 3.0, 3.0}, 4), 0.0, 1e-12);
}

TEST(Classify, GroundTruthOrders) {
  const auto absx = classify_signal("absx");
  EXPECT_EQ(absx.k_star, 0);
  EXPECT_NEAR(absx.alpha_star, 1.0, 0.05);
  EXPECT_NEAR(absx.plateau, 1.0 / std::sqrt(6.0), 0.1 / std::sqrt(6.0));

  const auto heav = classify_signal("heaviside");
  EXPECT_EQ(heav.k_star, -1);
  EXPECT_NEAR(heav.alpha_star, 1.0, 0.05);

  const auto xabs = classify_signal("xabsx");
  EXPECT_EQ(xabs.k_star, 1);
  EXPECT_NEAR(xabs.alpha_star, 1.0, 0.05);

  const auto smooth = classify_signal("smooth");
  EXPECT_EQ(smooth.k_star, 3);
  for (const auto* r : {&absx, &heav, &xabs, &smooth}) EXPECT_FALSE(r->inconclusive);
}

TEST(Classify, HolderExponentOfWeierstrass) {
  const auto w = classify_signal("weierstrass:0.5", 2);
  EXPECT_EQ(w.k_star, 0);
  EXPECT_NEAR(w.alpha_star, 0.5, 0.1);
}

TEST(Classify, OrdersAreDownwardClosed) {
  for (const char* name : {"absx", "heaviside", "xabsx", "smooth", "bump"}) {
    const auto r = classify_signal(name);
    ASSERT_EQ(r.bounded.size(), static_cast<std::size_t>(r.k_max + 2));
    for (std::size_t k = 1; k < r.bounded.size(); ++k)
      if (r.bounded[k]) EXPECT_TRUE(r.bounded[k - 1]) << name << " k=" << static_cast<int>(k) - 1;
    for (int k = -1; k <= r.k_star; ++k) EXPECT_TRUE(r.has_order(k)) << name;
    EXPECT_FALSE(r.has_order(r.k_star + 1));
  }
}

TEST(Classify, NegativeOrderAgrees) {
  for (const char* name : {"absx", "xabsx"}) {
    const auto r0 = classify_signal(name, 3, norms::NormSpec(0, 2.0));
    const auto r1 = classify_signal(name, 3, norms::NormSpec(1, 2.0));
    EXPECT_EQ(r0.k_star, r1.k_star) << name;
  }
}

TEST(Classify, StableUnderLadderStart) {
  for (const char* name : {"absx", "heaviside", "xabsx"}) {
    const auto fine = classify_signal(name, 3, {0, 2.0}, 0.125);
    const auto coarse = classify_signal(name, 3, {0, 2.0}, 0.25);
    EXPECT_EQ(fine.k_star, coarse.k_star) << name;
  }
}

TEST(Classify, ReportJsonKeyOrder) {
  const auto r = classify_signal("absx", 1);
  const Json j = to_json(r, true);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expected{"a",        "i",           "p",         "k_max",   "k_star",
                                          "alpha_star", "jet",       "r_squared", "plateau", "inconclusive",
                                          "super_holder", "diagnostics", "bounded", "vanishing", "profiles"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(j["profiles"].size(), 3u * 7u);
  EXPECT_FALSE(to_json(r).contains("profiles"));
}

TEST(Classify, ProfileCsvUsesCrlf) {
  const auto r = classify_signal("absx", 1);
  const std::string csv = profile_csv(r);
  EXPECT_EQ(csv.rfind("r,k,raw_residual,normalized_residual\r\n", 0), 0u);
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) ++lines;
  EXPECT_EQ(lines, 1u + 3u * 7u);
  EXPECT_EQ(csv.find('\n'), csv.find("\r\n") + 1);
  EXPECT_EQ(csv.substr(csv.size() - 2), "\r\n");
}

TEST(Sampling, DeterministicAndInsideMargin) {
  const Grid sq = Grid::square(-1.0, 1.0, 65);
  const auto a = sample_points(sq, 50, 42, 0.2);
  const auto b = sample_points(sq, 50, 42, 0.2);
  const auto c = sample_points(sq, 50, 43, 0.2);
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a)
    for (int ax = 0; ax < 2; ++ax) {
      EXPECT_GE(p[ax], -0.8);
      EXPECT_LE(p[ax], 0.8);
    }
}

TEST(Criterion, DerivativesDetermineOrder) {
  const auto rep = verify_criterion(signal("xabsx"), Point{0.3, 0.0}, 1, 2, norms::NormSpec(0, 2.0),
                                    dyadic_ladder(0.125, 7));
  EXPECT_TRUE(rep.pass());
  EXPECT_TRUE(rep.summary.value("hypothesis_met", false));
}

TEST(Criterion, HypothesisUnmetAtKink) {
  // The derivative of |x| jumps at 0, so it has no order-0 jet there.
  const auto rep = verify_criterion(signal("absx"), Point{}, 1, 0, norms::NormSpec(0, 2.0), dyadic_ladder(0.125, 7));
  EXPECT_TRUE(rep.pass());
  EXPECT_FALSE(rep.summary.value("hypothesis_met", true));
}

TEST(Rademacher, AlmostEveryPointOfLipschitzFunction) {
  const auto pts = sample_points(grid(), 20, 7, 0.2);
  const auto rep = verify_rademacher(signal("absx"), pts, 1, norms::NormSpec(0, 2.0), dyadic_ladder(0.125, 7));
  EXPECT_TRUE(rep.pass());
  const auto parallel =
      verify_rademacher(signal("absx"), pts, 1, norms::NormSpec(0, 2.0), dyadic_ladder(0.125, 7), 0.95, {}, 3);
  EXPECT_EQ(to_json(rep).dump(), to_json(parallel).dump());
}
