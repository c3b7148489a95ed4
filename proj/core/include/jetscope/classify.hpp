#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jetscope/distribution.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/report.hpp"

namespace jetscope::classify {

/// r_m = r0 2^{−m}, m = 0..count−1.
std::vector<double> dyadic_ladder(double r0, int count);

/// Dyadic ladder from r0 truncated so the finest ball spans at least
/// `min_nodes` grid spacings across its diameter; at most `max_count` levels.
std::vector<double> admissible_ladder(const Grid& grid, double r0, int max_count = 10,
                                      int min_nodes = 32);

struct ScaleRow {
  double r = 0.0;
  double raw = 0.0;
  double normalized = 0.0;
  Jet jet;
};

struct ScaleProfile {
  Point a{};
  norms::NormSpec spec;
  int k = 0;
  int dim = 1;
  std::vector<ScaleRow> rows;
};

/// r^{−n/q−k−i} with q the T-side exponent used by the dual norm.
double normalization_exponent(int dim, const norms::NormSpec& spec, int k);

/// spec is the test-function seminorm ν_{i,p}; residuals use |·|_{−i,q}.
ScaleProfile residual_profile(const DistributionRep& t, const Point& a, int k,
                              const norms::NormSpec& spec, const std::vector<double>& ladder);
/// Profiles for k = −1..k_max, sharing solves per scale.
std::vector<ScaleProfile> residual_profiles(const DistributionRep& t, const Point& a, int k_max,
                                            const norms::NormSpec& spec,
                                            const std::vector<double>& ladder);

struct Options {
  double tau = 0.25;
  /// Residuals below floor_ratio × (order −1 residual) count as exact.
  double floor_ratio = 1e-9;
  double min_r_squared = 0.9;
  int trend_points = 4;
};

/// Per-halving slope of log2 of the last points: negative means decay as r → 0.
double trend_slope(const std::vector<double>& values, int points);

struct OrderReport {
  Point a{};
  int dim = 1;
  norms::NormSpec spec;
  int k_max = 0;
  int k_star = -1;
  double alpha_star = 1.0;
  Jet jet;
  double r_squared = 1.0;
  double plateau = 0.0;
  bool inconclusive = false;
  bool super_holder = false;
  std::vector<std::string> diagnostics;
  std::vector<ScaleProfile> profiles;
  /// Whether order (k, 1) is bounded, per k = −1..k_max.
  std::vector<bool> bounded;
  std::vector<bool> vanishing;

  bool has_order(int k) const noexcept { return k <= k_star; }
  bool has_bounded_order(int k) const;
};

OrderReport classify_order(const std::vector<ScaleProfile>& profiles, const Options& opts = {});
OrderReport classify_point(const DistributionRep& t, const Point& a, int k_max,
                           const norms::NormSpec& spec, const std::vector<double>& ladder,
                           const Options& opts = {});

Json to_json(const OrderReport& r, bool with_profiles = false);
/// RFC-4180 CSV with columns r,k,raw_residual,normalized_residual.
std::string profile_csv(const OrderReport& r);

/// Points drawn uniformly from the grid box shrunk by `margin`, from a seed.
std::vector<Point> sample_points(const Grid& grid, int count, std::uint64_t seed, double margin);

/// Classifies every D^ξT, ξ ∈ Ξ(n,m), with k_max = k; if all reach order k,
/// asserts T reaches order k + m.
VerifierReport verify_criterion(const DistributionRep& t, const Point& a, int m, int k,
                                const norms::NormSpec& spec, const std::vector<double>& ladder,
                                const Options& opts = {});

/// Among points with order (k−1, 1), the fraction that also reach order k.
VerifierReport verify_rademacher(const DistributionRep& t, const std::vector<Point>& points, int k,
                                 const norms::NormSpec& spec, const std::vector<double>& ladder,
                                 double threshold = 0.95, const Options& opts = {}, int jobs = 1);

}  // namespace jetscope::classify
