#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "jetscope/grid.hpp"
#include "jetscope/report.hpp"

namespace jetscope::whitney {

/// h(x) = max(min(1, d), min(1, max(0, δ − d))) / 20 with d = dist(x, A).
double h_value(double dist_to_a, double delta) noexcept;

/// Exact nearest-point queries against a finite point set (bucketed).
class PointSet {
 public:
  PointSet(int dim, std::vector<Point> points);
  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return pts_.empty(); }
  std::size_t size() const noexcept { return pts_.size(); }
  const std::vector<Point>& points() const noexcept { return pts_; }
  /// Index of the nearest point and its distance.
  std::pair<std::size_t, double> nearest(const Point& x) const;

 private:
  int dim_;
  std::vector<Point> pts_;
  double cell_ = 1.0;
  Point origin_{};
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets_;
};

struct WhitneyCover {
  Grid grid;
  double delta = 0.0;
  PointSet a;
  /// dist(x, A) and h(x) at grid nodes.
  std::vector<double> dist;
  std::vector<double> h;
  /// Index into A of the nearest point ξ(x) per grid node.
  std::vector<std::size_t> xi;
  std::vector<Point> centers;
  std::vector<double> radii;
  /// ξ(s) per center.
  std::vector<Point> feet;

  double h_at(const Point& x) const;
  /// Centers s with |x − s| < 10 h(s).
  std::vector<std::size_t> active(const Point& x) const;
  /// Centers whose ball B(s, 10h(s)) meets B(x, 10h(x)).
  std::vector<std::size_t> neighbours(const Point& x) const;

  /// Centers bucketed per dyadic radius level: level → cell → members.
  std::map<int, std::map<std::pair<long, long>, std::vector<std::size_t>>> index;
  void rebuild_index();

 private:
  template <class Pred>
  std::vector<std::size_t> query(const Point& x, double extra, Pred keep) const;
};

/// A is given as a node mask on the grid. Centers come from a greedy Vitali
/// selection over the grid nodes, larger radii first.
WhitneyCover build_cover(const Grid& grid, const std::vector<char>& a_mask, double delta);

/// Exact disjointness of {B(s, h(s))} and 5-covering of the grid nodes.
VerifierReport verify_cover(const WhitneyCover& cover);

class PartitionOfUnity {
 public:
  /// ζ_s = Φ((x − s)/(10 h(s))) / Σ_t Φ((x − t)/(10 h(t))). The local sum is
  /// checked on grid nodes within `kappa`/18 of A (DegenerateSum below 1e−8).
  PartitionOfUnity(const WhitneyCover& cover, double kappa, int max_derivative = 2);

  const WhitneyCover& cover() const noexcept { return *cover_; }
  /// (s, ζ_s(x)) for the active centers.
  std::vector<std::pair<std::size_t, double>> weights(const Point& x) const;
  double sum(const Point& x) const;
  /// Measured V_k = max |D^kζ_s(x)| h(x)^k over sampled nodes.
  const std::vector<double>& derivative_constants() const noexcept { return v_; }
  std::size_t max_active() const noexcept { return max_active_; }

 private:
  const WhitneyCover* cover_;
  std::vector<double> v_;
  std::size_t max_active_ = 0;
};

/// v_{a,r} on the grid for a ∈ A and r ≤ κ, zero outside U(a, r).
using LocalSolver = std::function<SampledField(const Point& a, double r)>;

struct GlueParams {
  double kappa = 1.0;
  double lambda = 1.0;
  int i = 1;
  double p = 2.0;
  double m_bound = 1.0;
  double gamma = 1.0;
  /// Decreasing δ sequence; the last member stands in for the limit.
  std::vector<double> deltas;
  /// Radii r ≤ κ/72 at which the decay is measured.
  std::vector<double> radii;
  /// Points of A where decay is measured; defaults to every point of A.
  std::vector<Point> sample_a;
  double slope_tolerance = 0.2;
};

struct GlueResult {
  SampledField v;
  VerifierReport report;
  /// Measured slope per j = 0..i, for the finest δ.
  std::vector<double> slopes;
};

/// Glues local replacements with the Whitney partition, w_δ = Σ ζ_s v_s with
/// v_s = v_{ξ(s), 120h(s)}, and measures the decay of |D^j(u − w_δ)|_{p;a,r}.
GlueResult glue(const SampledField& u, const std::vector<char>& a_mask, const LocalSolver& local,
                const GlueParams& params);

/// Dumps (center, radius) rows as CSV.
std::string cover_csv(const WhitneyCover& cover);

}  // namespace jetscope::whitney
