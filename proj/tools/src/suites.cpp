#include "jetscope/tools/suites.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "jetscope/classify.hpp"
#include "jetscope/distribution.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/pde.hpp"
#include "jetscope/rescale.hpp"
#include "jetscope/signals.hpp"
#include "jetscope/test_function.hpp"
#include "jetscope/whitney.hpp"

namespace jetscope::suites {

namespace {

using norms::NormSpec;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Σ_m c_m cos(w_m · x + φ_m) with exact partial derivatives.
struct TrigPolynomial {
  int dim = 1;
  struct Wave {
    std::array<double, 2> w{};
    double c = 0.0, phase = 0.0;
  };
  std::vector<Wave> waves;

  double derivative(const MultiIndex& beta, const Point& x) const {
    double acc = 0.0;
    for (const Wave& wv : waves) {
      double factor = wv.c;
      for (int d = 0; d < dim; ++d) factor *= std::pow(wv.w[static_cast<std::size_t>(d)], beta[d]);
      const double arg = wv.w[0] * x[0] + (dim == 2 ? wv.w[1] * x[1] : 0.0) + wv.phase;
      // d/dx cos = −sin, so each derivative shifts the phase by π/2.
      acc += factor * std::cos(arg + beta.order() * std::numbers::pi / 2.0);
    }
    return acc;
  }
};

TrigPolynomial random_trig(std::mt19937_64& rng, int dim) {
  TrigPolynomial f;
  f.dim = dim;
  const int count = 2 + static_cast<int>(rng() % 3);
  for (int m = 0; m < count; ++m) {
    TrigPolynomial::Wave wv;
    for (int d = 0; d < dim; ++d) wv.w[static_cast<std::size_t>(d)] = uniform(rng, -4.0, 4.0);
    wv.c = uniform(rng, -1.0, 1.0);
    wv.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    f.waves.push_back(wv);
  }
  return f;
}

norms::DerivativeSource exact_source(const Grid& grid, std::function<double(const MultiIndex&, const Point&)> fn) {
  return [grid, fn](const MultiIndex& beta) {
    return SampledField::sample(grid, [&](const Point& x) { return fn(beta, x); });
  };
}

void absorb_prefixed(VerifierReport& into, const VerifierReport& part, const std::string& prefix) {
  for (Check c : part.checks) {
    c.label = prefix + c.label;
    into.checks.push_back(std::move(c));
  }
}

}  // namespace

VerifierReport poincare(const SuiteOptions& opts) {
  VerifierReport rep;
  rep.inequality = "|D^i(f-P)|_p <= (2^n r)^(k-i) |D^k f|_p";
  std::mt19937_64 rng(opts.seed);
  const Grid line = Grid::line(-1.0, 1.0, 2049);
  const Grid square = Grid::square(-1.0, 1.0, 129);
  const double exponents[] = {2.0, 1.5, 3.0};
  std::size_t checks = 0;
  for (int member = 0; member < 100; ++member) {
    const int dim = 1 + member % 2;
    const int k = 1 + (member / 2) % 3;
    const double p = exponents[member % 3];
    const TrigPolynomial f = random_trig(rng, dim);
    Point c{uniform(rng, -0.3, 0.3), dim == 2 ? uniform(rng, -0.3, 0.3) : 0.0};
    const Ball s(c, uniform(rng, 0.3, 0.6));
    const Grid& grid = dim == 1 ? line : square;
    const auto source = exact_source(grid, [f](const MultiIndex& b, const Point& x) { return f.derivative(b, x); });
    const VerifierReport part = norms::verify_poincare(source, dim, s, k, p);
    checks += part.checks.size();
    absorb_prefixed(rep, part, "member " + std::to_string(member) + " ");
  }
  rep.parameters = {{"members", 100}, {"checks", checks}, {"seed", opts.seed}};
  rep.summary["violations"] = rep.violations();
  return rep;
}

VerifierReport zero_boundary(const SuiteOptions& opts) {
  VerifierReport rep;
  rep.inequality = "|D^j u|_p <= r^(k-j) |D^k u|_p for spt u in U(a,r)";
  std::mt19937_64 rng(opts.seed + 1);
  for (int member = 0; member < 50; ++member) {
    const int dim = 1 + member % 2;
    const int k = 1 + (member / 2) % 3;
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
    const double p = member % 3 == 0 ? 2.0 : (member % 3 == 1 ? 1.5 : 4.0);
    Polynomial num(dim);
    for (int d = 0; d <= 2; ++d)
      for (int e = 0; e + d <= 2; ++e) {
        if (dim == 1 && e > 0) continue;
        num.add_term(dim == 1 ? MultiIndex::of(d) : MultiIndex::of(d, e), uniform(rng, -1.0, 1.0));
      }
    num.add_term(MultiIndex::zero(dim), 1.5);
    Point c{uniform(rng, -0.3, 0.3), dim == 2 ? uniform(rng, -0.3, 0.3) : 0.0};
    const double r = uniform(rng, 0.2, 0.6);
    const TestFunction theta = TestFunction::rational(dim, num, 0, c, r);
    const VerifierReport part = norms::verify_zero_boundary_poincare(theta, Ball(c, r), k, j, p);
    absorb_prefixed(rep, part, "member " + std::to_string(member) + " ");
  }
  rep.parameters = {{"members", 50}, {"seed", opts.seed}};
  rep.summary["violations"] = rep.violations();
  return rep;
}

VerifierReport interpolation(const SuiteOptions&) {
  VerifierReport rep;
  rep.inequality = "r^i|D^i u|_p <= eps r^k |D^k u|_p + C |u|_p, C stable under refinement";
  const Grid grid = Grid::line(-1.0, 1.0, 1025);
  const Ball s(Point{0.0, 0.0}, 0.9);
  std::vector<norms::FamilyMember> sines;
  for (int m = 1; m <= 8; ++m) sines.push_back([m](const Point& x) { return std::sin(m * x[0]); });
  const auto trig = norms::verify_interpolation(sines, grid, s, 1, 2, 2.0, 0.5);
  absorb_prefixed(rep, trig.report, "sin(mx) ");
  std::vector<norms::FamilyMember> monomials;
  for (int j = 0; j <= 4; ++j) monomials.push_back([j](const Point& x) { return std::pow(x[0], j); });
  const auto mono = norms::verify_interpolation(monomials, grid, s, 1, 2, 2.0, 0.5);
  absorb_prefixed(rep, mono.report, "x^j ");
  rep.summary["sin_constant"] = {trig.c_coarse, trig.c_fine};
  rep.summary["monomial_constant"] = {mono.c_coarse, mono.c_fine};
  return rep;
}

VerifierReport deformation(const SuiteOptions&) {
  VerifierReport rep;
  rep.inequality = "(T^{a,r} - T^{a,s})(theta) = integral of the deformation field; limit bound C M n r^(alpha+1)/(alpha+1)";
  const Grid grid = Grid::line(-1.0, 1.0, 4097);
  const auto t = DistributionRep::from_field(SampledField::sample(grid, [](const Point& x) { return x[0] * x[0]; }));
  const TestFunction phi = TestFunction::standard(1);
  const double lhs = rescale::pair_blowup(t, Point{}, 0.5, phi) - rescale::pair_blowup(t, Point{}, 0.25, phi);
  const double floor = 1e-13 * (std::abs(lhs) + 1.0);
  Json table = Json::array();
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double last = 0.0;
  for (int nodes : {8, 16, 32, 64}) {
    last = rescale::deformation_residual(t, Point{}, 0.5, 0.25, phi, nodes);
    if (last > std::max(previous, floor)) monotone = false;
    previous = last;
    table.push_back({{"nodes", nodes}, {"residual", last}});
  }
  rep.summary["residuals"] = table;
  rep.add_le("residual at 64 nodes", last, 1e-6);
  rep.add("residual non-increasing in nodes", monotone ? 1.0 : 0.0, 1.0, monotone, {{"floor", floor}});

  // T = 1 + x|x|: D T = 2|x| has |D T|_{0,2;0,t} = 2 sqrt(2/3) t^{3/2}, so alpha = 1.
  const Grid fine = Grid::line(-1.0, 1.0, 16385);
  const auto smooth_corner = DistributionRep::from_field(
      SampledField::sample(fine, [](const Point& x) { return 1.0 + x[0] * std::abs(x[0]); }));
  const double m_bound = 1.02 * 2.0 * std::sqrt(2.0 / 3.0);
  const auto lim = rescale::deformation_limit(smooth_corner, Point{}, NormSpec(0, 2.0), 1.0, 0.5, m_bound);
  rep.summary["limit_table"] = lim.table;
  rep.summary["limit_constant"] = lim.jet.coeff(MultiIndex::zero(1));
  rep.add_le("deformation limit bound", lim.achieved, lim.bound, 1e-3 * lim.bound);
  rep.add_le("limit constant error", std::abs(lim.jet.coeff(MultiIndex::zero(1)) - 1.0), 1e-3);
  return rep;
}

VerifierReport apriori(const SuiteOptions&) {
  VerifierReport rep;
  rep.inequality = "empirical a priori constants stable within 10% across two refinements";
  const Grid grid = Grid::line(-1.0, 1.0, 257);
  const Ball region(Point{0.0, 0.0}, 0.8);
  std::vector<pde::SmoothFunction> waves;
  for (int m = 1; m <= 6; ++m)
    for (double phase : {0.0, 0.7}) {
      waves.push_back([m, phase](const MultiIndex& b, const Point& x) {
        return std::pow(m, b.order()) * std::sin(m * x[0] + phase + b.order() * std::numbers::pi / 2.0);
      });
    }
  const auto interior = pde::apriori_probe_interior(waves, grid, region, 1, 0, 2.0);
  absorb_prefixed(rep, interior.report, "interior ");
  rep.summary["interior_constants"] = interior.constants;

  std::vector<pde::SmoothFunction> bumps;
  for (double c : {-0.3, 0.0, 0.25})
    for (double r : {0.4, 0.5}) {
      if (std::abs(c) + r > 0.8) continue;
      const TestFunction theta = TestFunction::bump(1, Point{c, 0.0}, r);
      bumps.push_back([theta](const MultiIndex& b, const Point& x) { return theta.derivative(b)(x); });
    }
  const auto zero = pde::apriori_probe_zero_boundary(bumps, grid, region, 1, 0, 2.0);
  absorb_prefixed(rep, zero.report, "zero boundary ");
  rep.summary["zero_boundary_constants"] = zero.constants;
  return rep;
}

VerifierReport duality(const SuiteOptions&) {
  VerifierReport rep;
  rep.inequality = "|f|_{0,p} = |f|_p; optimization and Riesz routes agree for p = 2";
  const Grid grid = Grid::line(-1.0, 1.0, 4097);
  const Ball unit(Point{0.0, 0.0}, 1.0, true);
  const auto f = SampledField::sample(grid, [](const Point& x) { return std::cos(3.0 * x[0]); });
  const auto t = DistributionRep::from_field(f);
  for (double p : {2.0, 1.5, 3.0}) {
    const double dual = norms::dual_norm(t, unit, NormSpec(0, p), norms::DualMethod::Optimization);
    const double direct = norms::lp_norm(f, unit, p);
    rep.add_le("i=0 duality p=" + format_double(p), std::abs(dual - direct) / direct, 1e-4);
  }

  const Ball open_unit(Point{0.0, 0.0}, 1.0);
  const auto one = DistributionRep::from_field(SampledField::sample(grid, [](const Point&) { return 1.0; }));
  const double c_riesz = norms::dual_norm(one, open_unit, NormSpec(1, 2.0), norms::DualMethod::Riesz);
  const double c_opt = norms::dual_norm(one, open_unit, NormSpec(1, 2.0), norms::DualMethod::Optimization);
  rep.add_le("constant field route agreement", std::abs(c_riesz - c_opt) / c_riesz, 0.02);
  rep.add_le("constant field closed form", std::abs(c_riesz - std::sqrt(2.0 / 3.0)) / std::sqrt(2.0 / 3.0), 0.02);
  for (double r : {0.25, 0.5}) {
    const auto delta = DistributionRep::dirac(1, Point{});
    const Ball s(Point{0.0, 0.0}, r);
    const double d_riesz = norms::dual_norm(delta, grid, s, NormSpec(1, 2.0), norms::DualMethod::Riesz);
    const double d_opt = norms::dual_norm(delta, grid, s, NormSpec(1, 2.0), norms::DualMethod::Optimization);
    const double exact = std::sqrt(r / 2.0);
    rep.add_le("delta route agreement r=" + format_double(r), std::abs(d_riesz - d_opt) / d_riesz, 0.02);
    rep.add_le("delta closed form r=" + format_double(r), std::abs(d_opt - exact) / exact, 0.02);
  }

  const Grid square = Grid::square(-1.0, 1.0, 65);
  const auto bump2 = DistributionRep::from_field(make_signal(parse_signal("smooth"), square));
  const Ball disc(Point{0.1, -0.1}, 0.6);
  const double s_riesz = norms::dual_norm(bump2, disc, NormSpec(1, 2.0), norms::DualMethod::Riesz);
  const double s_opt = norms::dual_norm(bump2, disc, NormSpec(1, 2.0), norms::DualMethod::Optimization);
  rep.add_le("2D route agreement", std::abs(s_riesz - s_opt) / s_riesz, 0.02);
  return rep;
}

namespace {

const Grid& criterion_grid() {
  static const Grid g = Grid::line(-1.0, 1.0, 16385);
  return g;
}

std::vector<double> default_ladder() { return classify::dyadic_ladder(0.125, 7); }

}  // namespace

VerifierReport criterion(const SuiteOptions& opts) {
  VerifierReport rep;
  rep.inequality = "order 0 of D^2 T coincides with order >= 2 of T";
  const Grid& grid = criterion_grid();
  const auto t = DistributionRep::from_field(make_signal(parse_signal("xabsx"), grid));
  const auto ladder = default_ladder();
  const double min_abs = 2.0 * ladder.back();
  std::mt19937_64 rng(opts.seed + 2);
  std::vector<Point> points;
  while (points.size() < 25) {
    const double x = uniform(rng, -0.6, 0.6);
    if (std::abs(x) > min_abs) points.push_back({x, 0.0});
  }
  const NormSpec spec(0, 2.0);
  std::size_t agree = 0;
  for (const Point& a : points) {
    const VerifierReport part = classify::verify_criterion(t, a, 2, 0, spec, ladder);
    const bool hypothesis = part.summary.value("hypothesis_met", false);
    bool direct_order = false;
    if (part.summary.contains("direct_k_star"))
      direct_order = part.summary["direct_k_star"].get<int>() >= 2;
    else
      direct_order = classify::classify_point(t, a, 2, spec, ladder).k_star >= 2;
    const bool same = hypothesis == direct_order;
    agree += same;
    rep.add("a=" + format_double(a[0]), direct_order ? 1.0 : 0.0, hypothesis ? 1.0 : 0.0, same && hypothesis);
  }
  rep.parameters = {{"points", points.size()}, {"seed", opts.seed}, {"signal", "xabsx"}};
  rep.summary["agreeing"] = agree;
  return rep;
}

VerifierReport rademacher(const SuiteOptions& opts) {
  VerifierReport rep;
  rep.inequality = "fraction of order (k-1,1) points reaching order k >= 0.95";
  const Grid& grid = criterion_grid();
  const auto ladder = default_ladder();
  const auto points = classify::sample_points(grid, 200, opts.seed, 0.2);
  for (const auto& [name, k] : std::vector<std::pair<std::string, int>>{{"absx", 1}, {"xabsx", 2}}) {
    const auto t = DistributionRep::from_field(make_signal(parse_signal(name), grid));
    const VerifierReport part = classify::verify_rademacher(t, points, k, NormSpec(0, 2.0), ladder, 0.95, {}, opts.jobs);
    absorb_prefixed(rep, part, name + " ");
    rep.summary[name] = part.summary;
  }
  rep.parameters = {{"points", points.size()}, {"seed", opts.seed}};
  return rep;
}

VerifierReport whitney(const SuiteOptions& opts) {
  VerifierReport rep;
  rep.inequality = "Whitney cover, partition of unity and gluing decay";
  const double kappa = 0.9;
  std::mt19937_64 rng(opts.seed + 3);

  // Cover and partition checks on a 2D set of three points.
  {
    // The candidate lattice must resolve the smallest radius, about delta/40.
    const Grid square(2, Point{-0.25, -0.25}, Point{0.25, 0.25}, {257, 257});
    std::vector<char> mask(square.size(), 0);
    for (const Point& p : {Point{0.0, 0.0}, Point{0.1, 0.05}, Point{-0.1, 0.1}}) {
      const auto c = square.nearest(p);
      mask[square.index(c[0], c[1])] = 1;
    }
    const auto cover = whitney::build_cover(square, mask, kappa / 18.0);
    absorb_prefixed(rep, whitney::verify_cover(cover), "2D ");
    const whitney::PartitionOfUnity pou(cover, kappa, 2);
    double worst = 0.0;
    for (int q = 0; q < 10000; ++q) {
      const auto& foot = cover.a.points()[static_cast<std::size_t>(rng() % cover.a.size())];
      const double rad = uniform(rng, 0.0, kappa / 18.0), ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const Point x{foot[0] + rad * std::cos(ang), foot[1] + rad * std::sin(ang)};
      worst = std::max(worst, std::abs(pou.sum(x) - 1.0));
    }
    rep.add_le("2D partition sum deviation", worst, 1e-10);
    rep.add_le("2D active count", static_cast<double>(pou.max_active()), 129.0 * 129.0);
    rep.summary["2D"] = {{"centers", cover.centers.size()},
                         {"max_active", pou.max_active()},
                         {"derivative_constants", pou.derivative_constants()}};
  }

  // 1D synthetic: u = |x|^{5/2}, A = {0}, polyharmonic (i = 1) local replacements.
  const Grid line = Grid::line(-1.0, 1.0, 40001);
  const auto u = SampledField::sample(line, [](const Point& x) { return std::pow(std::abs(x[0]), 2.5); });
  std::vector<char> mask(line.size(), 0);
  mask[static_cast<std::size_t>(line.nearest(Point{})[0])] = 1;
  const auto lap = DistributionRep::from_field(u, MultiIndex::of(2));
  const whitney::LocalSolver local = [&](const Point& a, double r) {
    return u - pde::solve_polylaplacian(lap, line, Ball(a, r), 1);
  };
  whitney::GlueParams params;
  params.kappa = kappa;
  params.lambda = 1.5;
  params.i = 1;
  params.p = 2.0;
  params.m_bound = 2.0;
  params.gamma = 0.5;
  for (int m = 0; m <= 6; m += 2) params.deltas.push_back(kappa / 18.0 * std::ldexp(1.0, -m));
  for (int m = 0; m < 4; ++m) params.radii.push_back(kappa / 72.0 * std::ldexp(1.0, -m));

  const auto cover = whitney::build_cover(line, mask, params.deltas.back());
  absorb_prefixed(rep, whitney::verify_cover(cover), "1D ");
  const whitney::PartitionOfUnity pou(cover, kappa, 2);
  double worst = 0.0;
  for (int q = 0; q < 10000; ++q) {
    const Point x{uniform(rng, -kappa / 18.0, kappa / 18.0), 0.0};
    worst = std::max(worst, std::abs(pou.sum(x) - 1.0));
  }
  rep.add_le("1D partition sum deviation", worst, 1e-10);
  rep.add_le("1D active count", static_cast<double>(pou.max_active()), 129.0);

  const auto glued = whitney::glue(u, mask, local, params);
  absorb_prefixed(rep, glued.report, "glue ");
  rep.summary["glue"] = glued.report.summary;
  rep.summary["1D"] = {{"centers", cover.centers.size()},
                       {"max_active", pou.max_active()},
                       {"derivative_constants", pou.derivative_constants()}};
  rep.parameters = {{"kappa", kappa}, {"seed", opts.seed}};
  return rep;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"poincare", "zero_boundary", "interpolation", "deformation", "apriori",
                                            "duality",  "criterion",     "rademacher",    "whitney"};
  return all;
}

bool is_suite(const std::string& name) {
  const auto& all = names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

VerifierReport run(const std::string& name, const SuiteOptions& opts) {
  using Fn = VerifierReport (*)(const SuiteOptions&);
  static const std::map<std::string, Fn> table{
      {"poincare", poincare},   {"zero_boundary", zero_boundary}, {"interpolation", interpolation},
      {"deformation", deformation}, {"apriori", apriori},       {"duality", duality},
      {"criterion", criterion}, {"rademacher", rademacher},     {"whitney", whitney}};
  const auto it = table.find(name);
  require(it != table.end(), "unknown suite '" + name + "'");
  return it->second(opts);
}

}  // namespace jetscope::suites
