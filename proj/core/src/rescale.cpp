#include "jetscope/rescale.hpp"

#include <algorithm>
#include <cmath>

#include "jetscope/error.hpp"
#include "jetscope/quadrature.hpp"

namespace jetscope::rescale {

double pair_blowup(const DistributionRep& t, const Jet& p, const Point& a, double r, const TestFunction& theta) {
  require(r > 0.0, "scale must be positive");
  const TestFunction scaled = theta.rescaled(a, r);
  const double value = p.degree() < 0 ? pair(t, scaled) : pair(t.minus(p), scaled);
  return std::pow(r, -t.dim()) * value;
}

double pair_blowup(const BlowupQuery& q) {
  require(q.t != nullptr, "blow-up query has no distribution");
  return pair_blowup(*q.t, q.p, q.a, q.r, q.theta);
}

double pair_blowup(const DistributionRep& t, const Point& a, double r, const TestFunction& theta) {
  return pair_blowup(t, Jet::zero(t.dim(), a), a, r, theta);
}

double deformation_integral(const DistributionRep& t, const Point& a, double r, double s, const TestFunction& theta,
                            int t_nodes) {
  require(0.0 < s && s <= r, "need 0 < s <= r");
  require(t_nodes >= 1, "need at least one quadrature node");
  if (s == r) return 0.0;
  // t^{−n}(D_jT)((X_jθ)((x − a)/t)) = −t^{−n−1} T((D_j X_jθ)((x − a)/t)).
  TestFunction phi(t.dim());
  for (int j = 0; j < t.dim(); ++j) phi = phi + theta.coordinate_multiply(j).derivative(j);
  const QuadratureRule rule = gauss_legendre(t_nodes, s, r);
  double acc = 0.0;
  for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
    const double tt = rule.nodes[m];
    acc -= rule.weights[m] * std::pow(tt, -t.dim() - 1) * pair(t, phi.rescaled(a, tt));
  }
  return acc;
}

double deformation_residual(const DistributionRep& t, const Point& a, double r, double s, const TestFunction& theta,
                            int t_nodes) {
  if (s == r) return 0.0;
  const double lhs = pair_blowup(t, a, r, theta) - pair_blowup(t, a, s, theta);
  return std::abs(lhs - deformation_integral(t, a, r, s, theta, t_nodes));
}

double localness_constant(const norms::NormSpec& spec) { return spec.i == 0 ? 1.0 : 2.0; }

std::vector<TestFunction> probe_family(int dim, const norms::NormSpec& spec) {
  const TestFunction phi = TestFunction::standard(dim);
  std::vector<TestFunction> probes{phi, phi.coordinate_multiply(0),
                                   TestFunction::bump(dim, {0.3, 0.0}, 0.7),
                                   TestFunction::bump(dim, {-0.3, 0.0}, 0.7)};
  for (auto& p : probes) p = p * (1.0 / norms::sobolev_seminorm(p, spec));
  return probes;
}

LimitResult deformation_limit(const DistributionRep& t, const Point& a, const norms::NormSpec& spec, double alpha,
                              double delta, double m_bound, double c_const, int levels) {
  require(alpha > -1.0, "exponent must exceed -1");
  require(delta > 0.0, "scale must be positive");
  require(levels >= 4, "need at least four ladder levels");
  const Grid* grid = t.grid();
  if (!grid) fail(ErrorCode::MissingDerivativeData, "distribution carries no grid");
  const int n = t.dim();
  const double c = c_const > 0.0 ? c_const : localness_constant(spec);
  const norms::NormSpec dual_spec{spec.i, spec.q()};
  const auto method = dual_spec.p == 2.0 ? norms::DualMethod::Riesz : norms::DualMethod::Optimization;

  LimitResult res;
  for (int m = 0; m < levels; ++m) res.ladder.push_back(std::ldexp(delta, -m));

  // Hypothesis: sup_t t^{−α} |(D_jT)^{a,t}|, which is t^{−α−n/q−i}|D_jT|_{−i,q;a,t}.
  for (double r : res.ladder)
    for (int j = 0; j < n; ++j) {
      const double v = norms::dual_norm(t.derivative(j), *grid, Ball(a, r), dual_spec, method);
      res.measured_m = std::max(res.measured_m, std::pow(r, -alpha - n / spec.q() - spec.i) * v);
    }
  if (res.measured_m > m_bound * (1.0 + 1e-6))
    fail(ErrorCode::HypothesisUnverified, "measured derivative modulus " + format_double(res.measured_m) +
                                              " exceeds the supplied bound " + format_double(m_bound));
  res.bound = c * m_bound * n / (alpha + 1.0);

  const auto probes = probe_family(n, spec);
  const double ratio = std::pow(2.0, alpha + 1.0);
  std::vector<std::vector<double>> values(probes.size());
  std::vector<double> limits(probes.size()), masses(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    masses[k] = integrate_over_support(probes[k], [&](const Point& x) { return probes[k](x); });
    for (double r : res.ladder) values[k].push_back(pair_blowup(t, a, r, probes[k]));
    // Richardson over the last four levels: v(r) ≈ L + c r^{α+1}.
    const auto& v = values[k];
    const std::size_t last = v.size() - 1;
    limits[k] = (ratio * v[last] - v[last - 1]) / (ratio - 1.0);
  }
  const double level = limits[0] / masses[0];
  res.jet = Jet::constant(n, a, level);

  const double r_min = res.ladder.back();
  const double tol = 1e-6 * (1.0 + std::abs(level)) + 2.0 * res.bound * std::pow(r_min, alpha + 1.0);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& v = values[k];
    const std::size_t last = v.size() - 1;
    const double earlier = (ratio * v[last - 2] - v[last - 3]) / (ratio - 1.0);
    if (std::abs(earlier - limits[k]) > tol || std::abs(limits[k] - level * masses[k]) > tol)
      fail(ErrorCode::NoConvergence, "blow-up limits do not settle to a constant");
  }

  for (std::size_t m = 0; m < res.ladder.size(); ++m) {
    const double r = res.ladder[m];
    Json row = {{"r", r}};
    Json per = Json::array();
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double dev = std::abs(values[k][m] - level * masses[k]);
      const double scaled = std::pow(r, -alpha - 1.0) * dev;
      res.achieved = std::max(res.achieved, scaled);
      per.push_back(scaled);
    }
    row["scaled_deviation"] = per;
    res.table.push_back(row);
  }
  res.within_bound = res.achieved <= res.bound * (1.0 + 1e-3);
  return res;
}

}  // namespace jetscope::rescale
