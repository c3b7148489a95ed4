// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jetscope/classify.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/pde.hpp"
#include "jetscope/rescale.hpp"
#include "jetscope/signals.hpp"
#include "jetscope/test_function.hpp"
#include "jetscope/tools/cli.hpp"
#include "jetscope/tools/suites.hpp"

using namespace jetscope;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome duality() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid = Grid::line(-1.0, 1.0, 4097);
  const auto f = SampledField::sample(grid, [](const Point& x) { return std::cos(3.0 * x[0]); });
  const Ball s(Point{0.0, 0.0}, 1.0, true);
  const double dual = norms::dual_norm(DistributionRep::from_field(f), s, norms::NormSpec(0, 2.0),
                                       norms::DualMethod::Optimization);
  const double direct = norms::lp_norm(f, s, 2.0);
  const double rel = std::abs(dual - direct) / direct;
  const double secs = seconds_since(t0);
  return {rel <= 1e-4 && secs < 5.0, "relative difference " + fmt(rel) + ", " + fmt(secs) + " s"};
}

Outcome route_agreement() {
  const Grid grid = Grid::line(-1.0, 1.0, 4097);
  const norms::NormSpec spec(1, 2.0);
  const auto one = DistributionRep::from_field(SampledField::sample(grid, [](const Point&) { return 1.0; }));
  const Ball unit(Point{0.0, 0.0}, 1.0);
  const double cr = norms::dual_norm(one, unit, spec, norms::DualMethod::Riesz);
  const double co = norms::dual_norm(one, unit, spec, norms::DualMethod::Optimization);
  double worst_route = std::abs(cr - co) / cr;
  double worst_closed = 0.0;
  for (double r : {0.25, 0.5}) {
    const auto delta = DistributionRep::dirac(1, Point{});
    const Ball s(Point{0.0, 0.0}, r);
    const double dr = norms::dual_norm(delta, grid, s, spec, norms::DualMethod::Riesz);
    const double dopt = norms::dual_norm(delta, grid, s, spec, norms::DualMethod::Optimization);
    worst_route = std::max(worst_route, std::abs(dr - dopt) / dr);
    const double exact = std::sqrt(r / 2.0);
    worst_closed = std::max({worst_closed, std::abs(dr - exact) / exact, std::abs(dopt - exact) / exact});
  }
  return {worst_route <= 0.02 && worst_closed <= 0.02,
          "route gap " + fmt(worst_route) + ", delta vs sqrt(r/2) " + fmt(worst_closed)};
}

Outcome from_suite(const std::string& name, std::size_t expected_members, double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const VerifierReport rep = suites::run(name, {});
  const double secs = seconds_since(t0);
  const std::size_t members = rep.parameters.value("members", std::size_t{0});
  const bool ok = rep.violations() == 0 && members == expected_members && !rep.checks.empty() && secs < time_limit;
  return {ok, std::to_string(members) + " members, " + std::to_string(rep.checks.size()) + " checks, " +
                  std::to_string(rep.violations()) + " violations, " + fmt(secs) + " s"};
}

Outcome deformation() {
  const Grid grid = Grid::line(-1.0, 1.0, 4097);
  const auto t = DistributionRep::from_field(SampledField::sample(grid, [](const Point& x) { return x[0] * x[0]; }));
  const TestFunction phi = TestFunction::standard(1);
  const double lhs = rescale::pair_blowup(t, Point{}, 0.5, phi) - rescale::pair_blowup(t, Point{}, 0.25, phi);
  // Residuals at the rounding floor count as non-increasing.
  const double floor = 1e-13 * (std::abs(lhs) + 1.0);
  std::vector<double> res;
  for (int nodes : {8, 16, 32, 64}) res.push_back(rescale::deformation_residual(t, Point{}, 0.5, 0.25, phi, nodes));
  bool monotone = true;
  for (std::size_t k = 1; k < res.size(); ++k) monotone = monotone && res[k] <= std::max(res[k - 1], floor);
  std::string table;
  for (double r : res) table += (table.empty() ? "" : " ") + fmt(r);
  return {res.back() <= 1e-6 && monotone, "residuals(8..64) " + table};
}

Outcome polylaplacian() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_order = 1e9;
  std::string detail;
  for (int i : {1, 2}) {
    std::vector<double> errs;
    for (int n : {256, 512, 1024, 2048}) {
      // i = 2 puts the boundary midway between nodes; i = 1 is node-aligned.
      const double h = i == 1 ? 2.0 / (n - 1) : 2.0 / (n - 2);
      const Grid g = i == 1 ? Grid::line(-1.0, 1.0, n) : Grid::line(-1.0 - h / 2.0, 1.0 + h / 2.0, n);
      const double c = i == 1 ? 1.0 : 24.0;
      const auto f = SampledField::sample(g, [c](const Point&) { return c; });
      const auto u = pde::solve_polylaplacian(f, Ball(Point{0.0, 0.0}, 1.0), i);
      double err = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = g.point(k)[0];
        const double exact = std::abs(x) < 1.0 ? (i == 1 ? (x * x - 1.0) / 2.0 : (x * x - 1.0) * (x * x - 1.0)) : 0.0;
        err = std::max(err, std::abs(u[k] - exact));
      }
      errs.push_back(err);
    }
    detail += "i=" + std::to_string(i) + " errors";
    for (std::size_t k = 0; k < errs.size(); ++k) {
      detail += " " + fmt(errs[k]);
      // Levels already at the rounding floor have converged; there is no order to measure.
      if (k > 0 && errs[k - 1] > 1e-9) worst_order = std::min(worst_order, std::log2(errs[k - 1] / errs[k]));
    }
    detail += "; ";
  }
  // The 2D box problem has (x^2-1)(y^2-1) as exact discrete solution.
  const Grid sq = Grid::square(-1.0, 1.0, 256);
  const auto f2 = SampledField::sample(sq, [](const Point& x) { return 2.0 * (x[1] * x[1] - 1.0) + 2.0 * (x[0] * x[0] - 1.0); });
  const auto u2 = pde::solve_polylaplacian(f2, sq.box(), 1);
  double err2 = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const Point x = sq.point(k);
    err2 = std::max(err2, std::abs(u2[k] - (x[0] * x[0] - 1.0) * (x[1] * x[1] - 1.0)));
  }
  const double secs = seconds_since(t0);
  detail += "2D 256^2 error " + fmt(err2) + "; min order " + fmt(worst_order) + "; " + fmt(secs) + " s";
  return {worst_order >= 1.8 && err2 <= 1e-9 && secs < 10.0, detail};
}

Outcome ground_truths() {
  const Grid grid = Grid::line(-1.0, 1.0, 16385);
  const auto ladder = classify::dyadic_ladder(0.125, 7);
  const norms::NormSpec spec(0, 2.0);
  const int k_max = 4;
  auto run = [&](const std::string& name) {
    return classify::classify_point(DistributionRep::from_field(make_signal(parse_signal(name), grid)), Point{},
                                    k_max, spec, ladder);
  };
  const auto absx = run("absx");
  const auto heav = run("heaviside");
  const auto xabs = run("xabsx");
  const auto smooth = run("smooth");
  const double plateau_err = std::abs(absx.plateau - 1.0 / std::sqrt(6.0)) / (1.0 / std::sqrt(6.0));
  auto order_is = [](const classify::OrderReport& r, int k) {
    return !r.inconclusive && r.k_star == k && std::abs(r.alpha_star - 1.0) < 0.05;
  };
  const bool ok = order_is(absx, 0) && plateau_err <= 0.10 && order_is(heav, -1) && order_is(xabs, 1) &&
                  order_is(smooth, k_max);
  auto show = [](const classify::OrderReport& r) {
    return "(" + std::to_string(r.k_star) + "," + fmt(r.alpha_star) + ")";
  };
  return {ok, "|x| " + show(absx) + " plateau " + fmt(absx.plateau) + ", H " + show(heav) + ", x|x| " + show(xabs) +
                  ", smooth " + show(smooth)};
}

Outcome criterion() {
  const VerifierReport rep = suites::criterion({});
  const std::size_t points = rep.parameters.value("points", std::size_t{0});
  return {points == 25 && rep.checks.size() == 25 && rep.violations() == 0,
          std::to_string(rep.summary.value("agreeing", std::size_t{0})) + "/" + std::to_string(points) +
              " points agree"};
}

Outcome rademacher() {
  const VerifierReport rep = suites::rademacher({});
  std::string detail;
  bool ok = rep.checks.size() == 2 && rep.violations() == 0;
  for (const auto& c : rep.checks) detail += c.label + " " + fmt(c.measured) + "; ";
  return {ok, detail + std::to_string(rep.parameters.value("points", 0)) + " points"};
}

Outcome apriori() {
  const Grid grid = Grid::line(-1.0, 1.0, 257);
  const Ball region(Point{0.0, 0.0}, 0.8);
  std::vector<pde::SmoothFunction> waves;
  for (int m = 1; m <= 6; ++m)
    waves.push_back([m](const MultiIndex& b, const Point& x) {
      return std::pow(m, b.order()) * std::sin(m * x[0] + 0.3 + b.order() * 1.5707963267948966);
    });
  const auto interior = pde::apriori_probe_interior(waves, grid, region, 1, 0, 2.0);
  std::vector<pde::SmoothFunction> bumps;
  for (double c : {-0.3, 0.0, 0.2}) {
    const TestFunction theta = TestFunction::bump(1, Point{c, 0.0}, 0.45);
    bumps.push_back([theta](const MultiIndex& b, const Point& x) { return theta.derivative(b)(x); });
  }
  const auto zero = pde::apriori_probe_zero_boundary(bumps, grid, region, 1, 0, 2.0);
  const bool ok = interior.constants.size() == 3 && zero.constants.size() == 3 && interior.variation <= 0.10 &&
                  zero.variation <= 0.10;
  return {ok, "interior variation " + fmt(interior.variation) + ", zero-boundary variation " + fmt(zero.variation)};
}

Outcome whitney() {
  const VerifierReport rep = suites::whitney({});
  std::string detail;
  for (const auto& c : rep.checks)
    if (c.label.find("slope") != std::string::npos || c.label.find("sum") != std::string::npos ||
        c.label.find("active") != std::string::npos)
      detail += c.label + " " + fmt(c.measured) + "; ";
  return {rep.violations() == 0 && !rep.checks.empty(), detail};
}

Outcome determinism() {
  auto capture = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::to_string(code) + "\n" + out.str() + err.str();
  };
  const std::vector<std::string> analyze{"analyze", "--signal", "xabsx", "--points", "random:24", "--k-max", "3"};
  const std::vector<std::string> verify{"verify", "rademacher"};
  bool same = true;
  std::string first_analyze, first_verify;
  for (const char* jobs : {"1", "3", "1"}) {
    auto a = analyze;
    a.insert(a.end(), {"--jobs", jobs});
    auto v = verify;
    v.insert(v.end(), {"--jobs", jobs});
    const std::string ra = capture(a), rv = capture(v);
    if (first_analyze.empty()) {
      first_analyze = ra;
      first_verify = rv;
    }
    same = same && ra == first_analyze && rv == first_verify;
  }
  const bool nonempty = first_analyze.rfind("0\n", 0) == 0 && first_verify.rfind("0\n", 0) == 0;
  return {same && nonempty, std::string(same ? "identical" : "differing") + " output across runs and --jobs 1/3"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dual norm of cos(3x) equals its L2 norm", duality},
      {"Riesz and optimization routes agree", route_agreement},
      {"Poincare inequality on 100 trig polynomials", [] { return from_suite("poincare", 100, 60.0); }},
      {"zero-boundary Poincare on 50 bump products", [] { return from_suite("zero_boundary", 50, 1e9); }},
      {"deformation identity residual", deformation},
      {"poly-Laplacian closed forms converge", polylaplacian},
      {"classifier ground truths", ground_truths},
      {"derivative criterion on x|x|", criterion},
      {"almost-everywhere upgrade", rademacher},
      {"a priori constants stable under refinement", apriori},
      {"Whitney cover, partition and gluing", whitney},
      {"deterministic CLI output", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << (k + 1) << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << " | "
              << o.detail << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
