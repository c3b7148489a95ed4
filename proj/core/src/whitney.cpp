#include "jetscope/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "jetscope/error.hpp"
#include "jetscope/jets.hpp"
#include "jetscope/norms.hpp"

namespace jetscope::whitney {

double h_value(double dist_to_a, double delta) noexcept {
  return std::max(std::min(1.0, dist_to_a), std::min(1.0, std::max(0.0, delta - dist_to_a))) / 20.0;
}

// ---------------------------------------------------------------------------

namespace {

std::pair<long, long> cell_of(const Point& x, const Point& origin, double cell) {
  return {static_cast<long>(std::floor((x[0] - origin[0]) / cell)),
          static_cast<long>(std::floor((x[1] - origin[1]) / cell))};
}

}  // namespace

PointSet::PointSet(int dim, std::vector<Point> points) : dim_(dim), pts_(std::move(points)) {
  if (pts_.empty()) return;
  Point lo = pts_.front(), hi = pts_.front();
  for (const auto& p : pts_)
    for (int d = 0; d < dim_; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  origin_ = lo;
  double extent = 0.0;
  for (int d = 0; d < dim_; ++d) extent = std::max(extent, hi[d] - lo[d]);
  // Roughly a handful of points per occupied cell.
  const double per_axis = dim_ == 1 ? static_cast<double>(pts_.size()) : std::sqrt(static_cast<double>(pts_.size()));
  cell_ = extent > 0.0 ? std::max(extent / std::max(1.0, per_axis / 2.0), 1e-12) : 1.0;
  for (std::size_t k = 0; k < pts_.size(); ++k) buckets_[cell_of(pts_[k], origin_, cell_)].push_back(k);
}

std::pair<std::size_t, double> PointSet::nearest(const Point& x) const {
  if (pts_.empty()) fail(ErrorCode::EmptySet, "nearest-point query against an empty set");
  const auto c = cell_of(x, origin_, cell_);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  // Expanding square rings; stop once the ring lies beyond the best distance.
  for (long ring = 0;; ++ring) {
    const long ylo = dim_ == 2 ? c.second - ring : c.second, yhi = dim_ == 2 ? c.second + ring : c.second;
    for (long cy = ylo; cy <= yhi; ++cy)
      for (long cx = c.first - ring; cx <= c.first + ring; ++cx) {
        if (std::max(std::abs(cx - c.first), dim_ == 2 ? std::abs(cy - c.second) : 0L) != ring) continue;
        const auto it = buckets_.find({cx, cy});
        if (it == buckets_.end()) continue;
        for (std::size_t k : it->second) {
          const double d = distance(x, pts_[k], dim_);
          if (d < best_d || (d == best_d && k < best)) {
            best_d = d;
            best = k;
          }
        }
      }
    if (best_d < std::numeric_limits<double>::infinity() && ring * cell_ >= best_d) break;
    if (ring > static_cast<long>(buckets_.size()) + 4 && best_d < std::numeric_limits<double>::infinity()) {
      // Far outside the occupied cells: fall back to a full scan.
      for (std::size_t k = 0; k < pts_.size(); ++k) {
        const double d = distance(x, pts_[k], dim_);
        if (d < best_d || (d == best_d && k < best)) {
          best_d = d;
          best = k;
        }
      }
      break;
    }
  }
  return {best, best_d};
}

// ---------------------------------------------------------------------------

namespace {

int level_of(double radius) { return static_cast<int>(std::floor(std::log2(radius))); }
/// Cell width per level: the largest support 10h within the level.
double level_cell(int level) { return 10.0 * std::ldexp(1.0, level + 1); }

}  // namespace

void WhitneyCover::rebuild_index() {
  index.clear();
  for (std::size_t s = 0; s < centers.size(); ++s) {
    const int level = level_of(radii[s]);
    index[level][cell_of(centers[s], Point{0.0, 0.0}, level_cell(level))].push_back(s);
  }
}

template <class Pred>
std::vector<std::size_t> WhitneyCover::query(const Point& x, double extra, Pred keep) const {
  std::vector<std::size_t> out;
  const int dim = grid.dim();
  for (const auto& [level, cells] : index) {
    const double cell = level_cell(level);
    const auto c = cell_of(x, Point{0.0, 0.0}, cell);
    const long reach = 1 + static_cast<long>(std::ceil(extra / cell));
    const long ylo = dim == 2 ? c.second - reach : c.second, yhi = dim == 2 ? c.second + reach : c.second;
    for (long cy = ylo; cy <= yhi; ++cy)
      for (long cx = c.first - reach; cx <= c.first + reach; ++cx) {
        const auto it = cells.find({cx, cy});
        if (it == cells.end()) continue;
        for (std::size_t s : it->second)
          if (keep(s)) out.push_back(s);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double WhitneyCover::h_at(const Point& x) const { return h_value(a.nearest(x).second, delta); }

std::vector<std::size_t> WhitneyCover::active(const Point& x) const {
  const int dim = grid.dim();
  return query(x, 0.0, [&](std::size_t s) { return distance(x, centers[s], dim) < 10.0 * radii[s]; });
}

std::vector<std::size_t> WhitneyCover::neighbours(const Point& x) const {
  const int dim = grid.dim();
  const double hx = h_at(x);
  return query(x, 10.0 * hx,
               [&](std::size_t s) { return distance(x, centers[s], dim) < 10.0 * radii[s] + 10.0 * hx; });
}

WhitneyCover build_cover(const Grid& grid, const std::vector<char>& a_mask, double delta) {
  require(a_mask.size() == grid.size(), "set mask does not match the grid");
  require(delta > 0.0, "delta must be positive");
  std::vector<Point> pts;
  for (std::size_t k = 0; k < a_mask.size(); ++k)
    if (a_mask[k]) pts.push_back(grid.point(k));
  if (pts.empty()) fail(ErrorCode::EmptySet, "the closed set A is empty");

  WhitneyCover cover{grid, delta, PointSet(grid.dim(), std::move(pts)), {}, {}, {}, {}, {}, {}, {}};
  const std::size_t n = grid.size();
  cover.dist.resize(n);
  cover.h.resize(n);
  cover.xi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [idx, d] = cover.a.nearest(grid.point(k));
    cover.xi[k] = idx;
    cover.dist[k] = d;
    cover.h[k] = h_value(d, delta);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return cover.h[l] > cover.h[r]; });

  // Greedy Vitali selection: keep a node when its ball misses every kept ball.
  const int dim = grid.dim();
  for (std::size_t k : order) {
    const Point x = grid.point(k);
    const double hx = cover.h[k];
    bool free = true;
    for (const auto& [level, cells] : cover.index) {
      const double cell = level_cell(level);
      const auto c = cell_of(x, Point{0.0, 0.0}, cell);
      const long reach = 1 + static_cast<long>(std::ceil(hx / cell));
      const long ylo = dim == 2 ? c.second - reach : c.second, yhi = dim == 2 ? c.second + reach : c.second;
      for (long cy = ylo; cy <= yhi && free; ++cy)
        for (long cx = c.first - reach; cx <= c.first + reach && free; ++cx) {
          const auto it = cells.find({cx, cy});
          if (it == cells.end()) continue;
          for (std::size_t s : it->second)
            if (distance(x, cover.centers[s], dim) <= hx + cover.radii[s]) {
              free = false;
              break;
            }
        }
      if (!free) break;
    }
    if (!free) continue;
    const std::size_t s = cover.centers.size();
    cover.centers.push_back(x);
    cover.radii.push_back(hx);
    cover.feet.push_back(cover.a.points()[cover.xi[k]]);
    const int level = level_of(hx);
    cover.index[level][cell_of(x, Point{0.0, 0.0}, level_cell(level))].push_back(s);
  }
  return cover;
}

VerifierReport verify_cover(const WhitneyCover& cover) {
  VerifierReport rep;
  rep.inequality = "disjoint B(s,h(s)), nodes covered by B(s,5h(s)), 1/3 <= h(x)/h(s) <= 3 on S_x";
  rep.parameters = {{"delta", cover.delta}, {"centers", cover.centers.size()}};
  const int dim = cover.grid.dim();
  std::size_t overlaps = 0;
  for (std::size_t s = 0; s < cover.centers.size(); ++s) {
    // Any overlapping partner lies within h(s) + h(t) ≤ 2 max h; scan by index.
    for (std::size_t t : cover.active(cover.centers[s])) {
      if (t <= s) continue;
      if (distance(cover.centers[s], cover.centers[t], dim) <= cover.radii[s] + cover.radii[t]) ++overlaps;
    }
  }
  rep.add("overlapping ball pairs", static_cast<double>(overlaps), 0.0, overlaps == 0);
  std::size_t uncovered = 0;
  double worst_ratio = 1.0;
  for (std::size_t k = 0; k < cover.grid.size(); ++k) {
    const Point x = cover.grid.point(k);
    const double hx = cover.h[k];
    bool covered = false;
    for (std::size_t s : cover.neighbours(x)) {
      if (distance(x, cover.centers[s], dim) <= 5.0 * cover.radii[s]) covered = true;
      const double ratio = hx / cover.radii[s];
      worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
    }
    if (!covered) ++uncovered;
  }
  rep.add("uncovered nodes", static_cast<double>(uncovered), 0.0, uncovered == 0);
  rep.add_le("max h ratio on S_x", worst_ratio, 3.0, 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

/// Φ(z) and its derivatives up to order two in z, by axis.
struct BumpJet {
  double v = 0.0;
  std::array<double, 2> d1{};
  std::array<std::array<double, 2>, 2> d2{};
};

BumpJet bump_jet(const Point& x, const Point& c, double rho, int dim) {
  BumpJet out;
  std::array<double, 2> z{(x[0] - c[0]) / rho, dim == 2 ? (x[1] - c[1]) / rho : 0.0};
  const double zz = z[0] * z[0] + z[1] * z[1];
  if (zz >= 1.0) return out;
  const double s = 1.0 - zz;
  const double phi = std::exp(-1.0 / s);
  out.v = phi;
  // Φ = exp(−1/s), ∂_a Φ = −2 z_a Φ / s², ∂_a∂_b Φ = Φ (4 z_a z_b (1 − 2 s)/s⁴ − 2 δ_ab / s²)... with 1/ρ factors.
  for (int a = 0; a < dim; ++a) out.d1[a] = -2.0 * z[a] * phi / (s * s) / rho;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const double cross = 4.0 * z[a] * z[b] * (1.0 - 2.0 * s) / (s * s * s * s);
      const double diag = a == b ? -2.0 / (s * s) : 0.0;
      out.d2[a][b] = phi * (cross + diag) / (rho * rho);
    }
  return out;
}

}  // namespace

PartitionOfUnity::PartitionOfUnity(const WhitneyCover& cover, double kappa, int max_derivative)
    : cover_(&cover), v_(static_cast<std::size_t>(std::max(0, max_derivative)) + 1, 0.0) {
  require(kappa > 0.0, "kappa must be positive");
  require(max_derivative >= 0 && max_derivative <= 2, "derivative constants are measured up to order two");
  const Grid& g = cover.grid;
  const int dim = g.dim();
  std::vector<std::size_t> sample;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (cover.dist[k] <= kappa / 18.0) sample.push_back(k);
  const std::size_t stride = std::max<std::size_t>(1, sample.size() / 20000);
  for (std::size_t idx = 0; idx < sample.size(); idx += stride) {
    const Point x = g.point(sample[idx]);
    const auto act = cover.active(x);
    max_active_ = std::max(max_active_, act.size());
    BumpJet total;
    std::vector<BumpJet> parts;
    for (std::size_t s : act) {
      parts.push_back(bump_jet(x, cover.centers[s], 10.0 * cover.radii[s], dim));
      const BumpJet& b = parts.back();
      total.v += b.v;
      for (int a = 0; a < dim; ++a) {
        total.d1[a] += b.d1[a];
        for (int c = 0; c < dim; ++c) total.d2[a][c] += b.d2[a][c];
      }
    }
    if (total.v < 1e-8) fail(ErrorCode::DegenerateSum, "partition denominator below 1e-8 near A");
    const double hx = cover.h[sample[idx]];
    const double sg = total.v;
    for (const BumpJet& b : parts) {
      v_[0] = std::max(v_[0], b.v / sg);
      if (max_derivative >= 1) {
        double acc = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double d = b.d1[a] / sg - b.v * total.d1[a] / (sg * sg);
          acc += d * d;
        }
        v_[1] = std::max(v_[1], std::sqrt(acc) * hx);
      }
      if (max_derivative >= 2) {
        double acc = 0.0;
        for (int a = 0; a < dim; ++a)
          for (int c = 0; c < dim; ++c) {
            const double d = b.d2[a][c] / sg - (b.d1[a] * total.d1[c] + b.d1[c] * total.d1[a] + b.v * total.d2[a][c]) / (sg * sg) +
                             2.0 * b.v * total.d1[a] * total.d1[c] / (sg * sg * sg);
            acc += d * d;
          }
        v_[2] = std::max(v_[2], std::sqrt(acc) * hx * hx);
      }
    }
  }
}

std::vector<std::pair<std::size_t, double>> PartitionOfUnity::weights(const Point& x) const {
  const int dim = cover_->grid.dim();
  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (std::size_t s : cover_->active(x)) {
    const double v = bump_jet(x, cover_->centers[s], 10.0 * cover_->radii[s], dim).v;
    if (v == 0.0) continue;
    out.emplace_back(s, v);
    total += v;
  }
  if (total < 1e-8) fail(ErrorCode::DegenerateSum, "partition denominator below 1e-8");
  for (auto& w : out) w.second /= total;
  return out;
}

double PartitionOfUnity::sum(const Point& x) const {
  double acc = 0.0;
  for (const auto& w : weights(x)) acc += w.second;
  return acc;
}

// ---------------------------------------------------------------------------

GlueResult glue(const SampledField& u, const std::vector<char>& a_mask, const LocalSolver& local,
                const GlueParams& params) {
  require(static_cast<bool>(local), "no local solutions supplied");
  require(!params.deltas.empty(), "need at least one delta");
  require(params.radii.size() >= 2, "need at least two decay radii");
  require(params.p > 1.0 && std::isfinite(params.p), "gluing needs 1 < p < inf");
  require(params.i >= 0 && params.lambda >= params.i, "need 0 <= i <= lambda");
  const Grid& g = u.grid();
  const int n = g.dim();
  const double kappa = params.kappa;
  for (double d : params.deltas) require(d > 0.0 && d <= kappa / 18.0 * (1.0 + 1e-12), "delta must lie in (0, kappa/18]");
  for (double r : params.radii) require(r > 0.0 && r <= kappa / 72.0 * (1.0 + 1e-12), "decay radii must lie in (0, kappa/72]");

  std::vector<Point> sample_a = params.sample_a;
  if (sample_a.empty())
    for (std::size_t k = 0; k < a_mask.size(); ++k)
      if (a_mask[k]) sample_a.push_back(g.point(k));
  if (sample_a.empty()) fail(ErrorCode::EmptySet, "the closed set A is empty");

  VerifierReport report;
  report.inequality = "|D^j(u - v)|_{p;a,r} <= Delta M r^(n/p+lambda+i-j)";
  report.parameters = {{"kappa", kappa}, {"lambda", params.lambda}, {"i", params.i},
                           {"p", params.p},  {"M", params.m_bound},     {"gamma", params.gamma}};

  // Hypotheses at the sample points over the dyadic radii up to kappa.
  const int k_deg = static_cast<int>(std::floor(params.lambda - params.i + 1e-12));
  double m_hat = 0.0, gamma_hat = 0.0;
  for (const Point& a : sample_a)
    for (int m = 0; m < 4; ++m) {
      const double r = std::ldexp(kappa, -m);
      const SampledField v = local(a, r);
      const SampledField diff = u - v;
      const double dn = norms::derivative_norm(norms::finite_differences(diff), n, Ball(a, r), params.i, params.p);
      m_hat = std::max(m_hat, std::pow(r, -n / params.p - params.lambda) * dn);
      const int deg = 2 * params.i + k_deg - 1;
      const double resid = jets::fit_jet_lp(u, a, r, deg, params.p).residual;
      gamma_hat = std::max(gamma_hat, std::pow(r, -n / params.p - params.i) * resid);
    }
  report.add_le("measured M", m_hat, params.m_bound, 1e-9);
  report.add_le("measured gamma", gamma_hat, params.gamma, 1e-9);
  if (m_hat > params.m_bound * (1.0 + 1e-9))
    fail(ErrorCode::HypothesisUnverified, "local replacements exceed the decay bound M: measured " + format_double(m_hat));

  Json per_delta = Json::array();
  std::vector<double> finest_slopes;
  std::optional<SampledField> finest;
  for (double delta : params.deltas) {
    const WhitneyCover cover = build_cover(g, a_mask, delta);
    const PartitionOfUnity pou(cover, kappa, 0);
    std::map<std::size_t, SampledField> cache;
    auto v_of = [&](std::size_t s) -> const SampledField& {
      auto it = cache.find(s);
      if (it == cache.end()) it = cache.emplace(s, local(cover.feet[s], 120.0 * cover.radii[s])).first;
      return it->second;
    };
    std::vector<double> w(u.values().begin(), u.values().end());
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (cover.dist[k] > kappa / 18.0) continue;
      double acc = 0.0;
      for (const auto& [s, z] : pou.weights(g.point(k))) acc += z * v_of(s)[k];
      w[k] = acc;
    }
    const SampledField wd(g, std::move(w));
    const SampledField diff = u - wd;
    Json row = {{"delta", delta}, {"centers", cover.centers.size()}, {"local_solves", cache.size()}};
    Json slopes = Json::array();
    std::vector<double> current;
    for (int j = 0; j <= params.i; ++j) {
      const double expected = n / params.p + params.lambda + params.i - j;
      double worst = std::numeric_limits<double>::infinity();
      double delta_hat = 0.0;
      for (const Point& a : sample_a) {
        std::vector<double> xs, ys;
        for (double r : params.radii) {
          const double e = norms::derivative_norm(norms::finite_differences(diff), n, Ball(a, r), j, params.p);
          delta_hat = std::max(delta_hat, e / (params.m_bound * std::pow(r, expected)));
          xs.push_back(std::log(r));
          ys.push_back(std::log(std::max(e, 1e-300)));
        }
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t q = 0; q < xs.size(); ++q) {
          sxy += (xs[q] - mx) * (ys[q] - my);
          sxx += (xs[q] - mx) * (xs[q] - mx);
        }
        const double slope = sxy / sxx;
        // The slowest decay across the sample decides.
        if (std::abs(slope - expected) > std::abs(worst - expected) || !std::isfinite(worst)) worst = slope;
      }
      current.push_back(worst);
      slopes.push_back({{"j", j}, {"slope", worst}, {"expected", expected}, {"delta_constant", delta_hat}});
    }
    row["slopes"] = slopes;
    per_delta.push_back(row);
    finest_slopes = current;
    finest = wd;
  }
  for (int j = 0; j <= params.i; ++j) {
    const double expected = n / params.p + params.lambda + params.i - j;
    const double dev = std::abs(finest_slopes[static_cast<std::size_t>(j)] - expected);
    report.add("decay slope j=" + std::to_string(j), finest_slopes[static_cast<std::size_t>(j)], expected,
                   dev <= params.slope_tolerance, {{"tolerance", params.slope_tolerance}});
  }
  report.summary["deltas"] = per_delta;
  return GlueResult{std::move(*finest), std::move(report), std::move(finest_slopes)};
}

std::string cover_csv(const WhitneyCover& cover) {
  std::ostringstream os;
  const bool two = cover.grid.dim() == 2;
  os << (two ? "center_x,center_y,radius\r\n" : "center,radius\r\n");
  for (std::size_t s = 0; s < cover.centers.size(); ++s) {
    os << format_double(cover.centers[s][0]);
    if (two) os << ',' << format_double(cover.centers[s][1]);
    os << ',' << format_double(cover.radii[s]) << "\r\n";
  }
  return os.str();
}

}  // namespace jetscope::whitney
