#include "jetscope/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "jetscope/error.hpp"
#include "jetscope/jets.hpp"

namespace jetscope::classify {

std::vector<double> dyadic_ladder(double r0, int count) {
  require(r0 > 0.0 && count >= 1, "ladder needs r0 > 0 and at least one level");
  std::vector<double> out;
  for (int m = 0; m < count; ++m) out.push_back(std::ldexp(r0, -m));
  return out;
}

std::vector<double> admissible_ladder(const Grid& grid, double r0, int max_count, int min_nodes) {
  require(r0 > 0.0 && max_count >= 1, "ladder needs r0 > 0 and at least one level");
  double h = grid.spacing(0);
  if (grid.dim() == 2) h = std::max(h, grid.spacing(1));
  std::vector<double> out;
  for (int m = 0; m < max_count; ++m) {
    const double r = std::ldexp(r0, -m);
    if (2.0 * r / h < min_nodes * (1.0 - 1e-12)) break;
    out.push_back(r);
  }
  return out;
}

double normalization_exponent(int dim, const norms::NormSpec& spec, int k) {
  return dim / spec.q() + k + spec.i;
}

std::vector<ScaleProfile> residual_profiles(const DistributionRep& t, const Point& a, int k_max,
                                            const norms::NormSpec& spec, const std::vector<double>& ladder) {
  require(k_max >= -1, "k_max must be at least -1");
  for (std::size_t m = 1; m < ladder.size(); ++m)
    require(ladder[m] < ladder[m - 1], "ladder must be strictly decreasing");
  const int n = t.dim();
  std::vector<ScaleProfile> profiles;
  for (int k = -1; k <= k_max; ++k) {
    ScaleProfile p;
    p.a = a;
    p.spec = spec;
    p.k = k;
    p.dim = n;
    profiles.push_back(std::move(p));
  }
  const norms::NormSpec dual_spec{spec.i, spec.q()};
  for (double r : ladder) {
    const auto fits = jets::fit_jets_dual(t, a, r, k_max, dual_spec);
    for (int k = -1; k <= k_max; ++k) {
      const auto& fit = fits[static_cast<std::size_t>(k + 1)];
      ScaleRow row;
      row.r = r;
      row.raw = fit.residual;
      row.normalized = std::pow(r, -normalization_exponent(n, spec, k)) * fit.residual;
      row.jet = fit.jet;
      if (!std::isfinite(row.raw)) fail(ErrorCode::SolverDivergence, "non-finite residual in scale profile");
      profiles[static_cast<std::size_t>(k + 1)].rows.push_back(std::move(row));
    }
  }
  return profiles;
}

ScaleProfile residual_profile(const DistributionRep& t, const Point& a, int k, const norms::NormSpec& spec,
                              const std::vector<double>& ladder) {
  return residual_profiles(t, a, k, spec, ladder).back();
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r_squared = 1.0;
};

/// Least squares of log2(v) against the halving index over the last points.
LineFit fit_tail(const std::vector<double>& values, int points) {
  const int m = static_cast<int>(values.size());
  const int count = std::min(points, m);
  const int first = m - count;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int j = first; j < m; ++j) {
    const double x = j - first;
    const double y = std::log2(std::max(values[static_cast<std::size_t>(j)], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  LineFit f;
  const double den = count * sxx - sx * sx;
  if (count < 2 || den == 0.0) return f;
  f.slope = (count * sxy - sx * sy) / den;
  const double ss_tot = syy - sy * sy / count;
  const double intercept = (sy - f.slope * sx) / count;
  double ss_res = 0.0;
  for (int j = first; j < m; ++j) {
    const double y = std::log2(std::max(values[static_cast<std::size_t>(j)], 1e-300));
    const double e = y - intercept - f.slope * (j - first);
    ss_res += e * e;
  }
  f.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return f;
}

std::vector<double> column(const ScaleProfile& p, bool normalized) {
  std::vector<double> v;
  for (const auto& row : p.rows) v.push_back(normalized ? row.normalized : row.raw);
  return v;
}

}  // namespace

double trend_slope(const std::vector<double>& values, int points) { return fit_tail(values, points).slope; }

bool OrderReport::has_bounded_order(int k) const {
  const int idx = k + 1;
  return idx >= 0 && idx < static_cast<int>(bounded.size()) && bounded[static_cast<std::size_t>(idx)];
}

OrderReport classify_order(const std::vector<ScaleProfile>& profiles, const Options& opts) {
  require(!profiles.empty() && profiles.front().k == -1, "profiles must start at k = -1");
  OrderReport rep;
  const ScaleProfile& base = profiles.front();
  rep.a = base.a;
  rep.dim = base.dim;
  rep.spec = base.spec;
  rep.k_max = profiles.back().k;
  rep.profiles = profiles;
  rep.jet = Jet::zero(rep.dim, rep.a);
  const std::size_t levels = base.rows.size();
  if (levels < 5) {
    rep.inconclusive = true;
    rep.diagnostics.push_back("fewer than five ladder points");
  }
  if (levels == 0) return rep;
  const double ref = base.rows.back().raw;
  auto at_floor = [&](const ScaleProfile& p) { return p.rows.back().raw <= opts.floor_ratio * ref; };

  for (const auto& p : profiles) {
    const bool floor = at_floor(p);
    const auto nv = column(p, true);
    rep.vanishing.push_back(floor || trend_slope(nv, opts.trend_points) <= -opts.tau);
    // Order (k, 1) bounded: r^{−1} times the normalized residual stays bounded.
    std::vector<double> b;
    for (const auto& row : p.rows) b.push_back(row.normalized / row.r);
    rep.bounded.push_back(floor || trend_slope(b, opts.trend_points) <= opts.tau);
  }

  int k_star = -2;
  for (std::size_t j = 0; j < profiles.size(); ++j)
    if (rep.vanishing[j]) k_star = profiles[j].k;
  if (k_star == -2) {
    rep.k_star = -1;
    rep.inconclusive = true;
    rep.diagnostics.push_back("no candidate degree vanishes: below the classifiable range");
    rep.alpha_star = 1.0;
    return rep;
  }
  rep.k_star = k_star;
  const ScaleProfile& chosen = profiles[static_cast<std::size_t>(k_star + 1)];
  rep.jet = chosen.rows.back().jet;
  const double expo = normalization_exponent(rep.dim, rep.spec, k_star);

  if (at_floor(chosen)) {
    rep.alpha_star = 1.0;
    rep.diagnostics.push_back("residual at numerical floor for the selected degree");
  } else {
    const LineFit fit = fit_tail(column(chosen, false), opts.trend_points);
    rep.r_squared = fit.r_squared;
    const double alpha = -fit.slope - expo;
    if (alpha > 1.0) {
      // Fits within a few percent of one are ordinary Lipschitz-type decay.
      rep.alpha_star = 1.0;
      if (alpha > 1.05) {
        rep.super_holder = true;
        rep.diagnostics.push_back("measured exponent above one: super-Holder");
      }
    } else if (alpha <= 0.0) {
      rep.alpha_star = std::numeric_limits<double>::min();
      rep.diagnostics.push_back("measured exponent not positive; clamped");
    } else {
      rep.alpha_star = alpha;
    }
    if (fit.r_squared < opts.min_r_squared) {
      rep.inconclusive = true;
      rep.diagnostics.push_back("slope fit R^2 below threshold");
    }
  }
  if (rep.k_star == -1 && rep.alpha_star < 1.0) {
    if (rep.has_bounded_order(-1)) {
      rep.alpha_star = 1.0;
    } else {
      rep.inconclusive = true;
      rep.diagnostics.push_back("order below (-1, 1)");
    }
  }
  const ScaleRow& fine = chosen.rows.back();
  rep.plateau = std::pow(fine.r, -(expo + rep.alpha_star)) * fine.raw;
  return rep;
}

OrderReport classify_point(const DistributionRep& t, const Point& a, int k_max, const norms::NormSpec& spec,
                           const std::vector<double>& ladder, const Options& opts) {
  return classify_order(residual_profiles(t, a, k_max, spec, ladder), opts);
}

namespace {

Json jet_json(const Jet& jet) {
  Json c = Json::object();
  for (const auto& [beta, v] : jet.coeffs()) c[beta.str()] = v;
  Json base = Json::array();
  for (int d = 0; d < jet.dim(); ++d) base.push_back(jet.basepoint()[static_cast<std::size_t>(d)]);
  return {{"basepoint", base}, {"degree", jet.degree()}, {"coefficients", c}};
}

Json point_json(const Point& a, int dim) {
  Json p = Json::array();
  for (int d = 0; d < dim; ++d) p.push_back(a[static_cast<std::size_t>(d)]);
  return p;
}

}  // namespace

Json to_json(const OrderReport& r, bool with_profiles) {
  Json j;
  j["a"] = point_json(r.a, r.dim);
  j["i"] = r.spec.i;
  j["p"] = r.spec.p;
  j["k_max"] = r.k_max;
  j["k_star"] = r.k_star;
  j["alpha_star"] = r.alpha_star;
  j["jet"] = jet_json(r.jet);
  j["r_squared"] = r.r_squared;
  j["plateau"] = r.plateau;
  j["inconclusive"] = r.inconclusive;
  j["super_holder"] = r.super_holder;
  j["diagnostics"] = r.diagnostics;
  Json bounded = Json::array(), vanishing = Json::array();
  for (bool b : r.bounded) bounded.push_back(b);
  for (bool v : r.vanishing) vanishing.push_back(v);
  j["bounded"] = bounded;
  j["vanishing"] = vanishing;
  if (with_profiles) {
    Json rows = Json::array();
    for (const auto& p : r.profiles)
      for (const auto& row : p.rows)
        rows.push_back({{"r", row.r}, {"k", p.k}, {"raw_residual", row.raw}, {"normalized_residual", row.normalized}});
    j["profiles"] = rows;
  }
  return j;
}

std::string profile_csv(const OrderReport& r) {
  std::ostringstream os;
  os << "r,k,raw_residual,normalized_residual\r\n";
  for (const auto& p : r.profiles)
    for (const auto& row : p.rows)
      os << format_double(row.r) << ',' << p.k << ',' << format_double(row.raw) << ','
         << format_double(row.normalized) << "\r\n";
  return os.str();
}

std::vector<Point> sample_points(const Grid& grid, int count, std::uint64_t seed, double margin) {
  require(count >= 0, "sample count must be nonnegative");
  std::mt19937_64 rng(seed);
  // Fixed 53-bit mapping so the draw does not depend on the library's distribution code.
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Point> out;
  for (int s = 0; s < count; ++s) {
    Point p{0.0, 0.0};
    for (int d = 0; d < grid.dim(); ++d) {
      const double lo = grid.lo(d) + margin, hi = grid.hi(d) - margin;
      require(hi > lo, "sampling margin leaves an empty box");
      p[static_cast<std::size_t>(d)] = lo + (hi - lo) * unit();
    }
    out.push_back(p);
  }
  return out;
}

VerifierReport verify_criterion(const DistributionRep& t, const Point& a, int m, int k, const norms::NormSpec& spec,
                                const std::vector<double>& ladder, const Options& opts) {
  require(m >= 0 && k >= 0, "derivative count and order must be nonnegative");
  VerifierReport rep;
  rep.inequality = "all D^xi T of order k at a implies T of order k+m at a";
  rep.parameters = {{"a", point_json(a, t.dim())}, {"m", m}, {"k", k}, {"i", spec.i}, {"p", spec.p}};
  bool hypothesis = true;
  Json derived = Json::array();
  for (const auto& xi : enumerate_multiindices(t.dim(), m)) {
    const OrderReport r = classify_point(t.derivative(xi), a, k, spec, ladder, opts);
    derived.push_back({{"xi", xi.str()}, {"k_star", r.k_star}, {"alpha_star", r.alpha_star}});
    if (r.k_star < k) hypothesis = false;
  }
  rep.summary["derivatives"] = derived;
  rep.summary["hypothesis_met"] = hypothesis;
  if (!hypothesis) {
    rep.summary["status"] = "hypothesis unmet";
    return rep;
  }
  const OrderReport direct = classify_point(t, a, k + m, spec, ladder, opts);
  rep.summary["direct_k_star"] = direct.k_star;
  rep.add("order of T", direct.k_star, k + m, direct.k_star >= k + m);
  return rep;
}

VerifierReport verify_rademacher(const DistributionRep& t, const std::vector<Point>& points, int k,
                                 const norms::NormSpec& spec, const std::vector<double>& ladder, double threshold,
                                 const Options& opts, int jobs) {
  require(k >= 0, "order must be nonnegative");
  VerifierReport rep;
  rep.inequality = "order (k-1,1) upgrades to order k at almost every point";
  rep.parameters = {{"k", k}, {"i", spec.i}, {"p", spec.p}, {"points", points.size()}, {"threshold", threshold}};
  std::vector<signed char> eligible(points.size(), 0), upgraded(points.size(), 0);
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < points.size(); idx = next++) {
      try {
        const OrderReport r = classify_point(t, points[idx], k, spec, ladder, opts);
        eligible[idx] = r.has_bounded_order(k - 1);
        upgraded[idx] = r.vanishing[static_cast<std::size_t>(k + 1)];
      } catch (const Error& e) {
        errors[idx] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) fail(ErrorCode::SolverDivergence, "classification failed at a sample point: " + e);

  std::size_t n_eligible = 0, n_upgraded = 0;
  Json missed = Json::array();
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    if (!eligible[idx]) continue;
    ++n_eligible;
    if (upgraded[idx])
      ++n_upgraded;
    else
      missed.push_back(point_json(points[idx], t.dim()));
  }
  const double fraction = n_eligible ? static_cast<double>(n_upgraded) / static_cast<double>(n_eligible) : 1.0;
  rep.summary["eligible"] = n_eligible;
  rep.summary["upgraded"] = n_upgraded;
  rep.summary["fraction"] = fraction;
  rep.summary["not_upgraded"] = missed;
  rep.add("upgraded fraction", fraction, threshold, fraction >= threshold);
  return rep;
}

}  // namespace jetscope::classify
