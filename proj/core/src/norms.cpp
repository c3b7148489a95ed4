#include "jetscope/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "jetscope/error.hpp"
#include "jetscope/quadrature.hpp"

namespace jetscope::norms {

double conjugate(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

NormSpec::NormSpec(int order, double exponent) : i(order), p(exponent) {
  require(order >= 0, "derivative order must be nonnegative");
  if (!(exponent >= 1.0)) fail(ErrorCode::UnsupportedExponent, "exponent must lie in [1, inf]");
}

namespace {

constexpr int kTableOrder = 2 * kMaxPairingOrder + 2;

const std::vector<double>& multinomials(int dim, int i) {
  static const auto table = [] {
    std::array<std::vector<std::vector<double>>, 3> t;
    for (int n = 1; n <= 2; ++n) {
      t[n].resize(kTableOrder + 1);
      for (int k = 0; k <= kTableOrder; ++k)
        for (const auto& a : enumerate_multiindices(n, k)) t[n][k].push_back(a.multinomial());
    }
    return t;
  }();
  require(dim >= 1 && dim <= 2 && i >= 0 && i <= kTableOrder, "tensor order out of range");
  return table[dim][i];
}

double power_of(double v, double p) { return p == 2.0 ? v * v : std::pow(v, p); }

}  // namespace

double tensor_norm(int dim, int i, const double* values) {
  const auto& w = multinomials(dim, i);
  double acc = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t) acc += w[t] * values[t] * values[t];
  return std::sqrt(acc);
}

double lp_norm(const SampledField& f, const Ball& s, double p) {
  if (!(p >= 1.0)) fail(ErrorCode::UnsupportedExponent, "exponent must lie in [1, inf]");
  const auto quad = region_quadrature(f.grid(), s);
  if (quad.empty()) fail(ErrorCode::EmptyRegion, "region contains no grid nodes");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& nw : quad) m = std::max(m, std::abs(f[nw.index]));
    return m;
  }
  double acc = 0.0;
  for (const auto& nw : quad) acc += nw.weight * power_of(std::abs(f[nw.index]), p);
  return std::pow(acc, 1.0 / p);
}

DerivativeSource finite_differences(const SampledField& f) {
  return [f](const MultiIndex& beta) { return beta.order() == 0 ? f : f.derivative(beta); };
}

namespace {

double derivative_norm_impl(const DerivativeSource& f, const Jet* p_jet, int dim, const Ball& s, int j,
                            double p) {
  if (!(p >= 1.0)) fail(ErrorCode::UnsupportedExponent, "exponent must lie in [1, inf]");
  const auto alphas = enumerate_multiindices(dim, j);
  std::vector<SampledField> fields;
  std::vector<Jet> polys;
  fields.reserve(alphas.size());
  for (const auto& a : alphas) {
    fields.push_back(f(a));
    if (p_jet) polys.push_back(p_jet->derivative(a));
  }
  const Grid& g = fields.front().grid();
  const auto quad = region_quadrature(g, s);
  if (quad.empty()) fail(ErrorCode::EmptyRegion, "region contains no grid nodes");
  std::vector<double> vals(alphas.size());
  double acc = 0.0;
  for (const auto& nw : quad) {
    const Point x = g.point(nw.index);
    for (std::size_t t = 0; t < alphas.size(); ++t) {
      vals[t] = fields[t][nw.index];
      if (p_jet) vals[t] -= polys[t](x);
    }
    const double v = tensor_norm(dim, j, vals.data());
    if (std::isinf(p))
      acc = std::max(acc, v);
    else
      acc += nw.weight * power_of(v, p);
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

}  // namespace

double derivative_norm(const DerivativeSource& f, int dim, const Ball& s, int j, double p) {
  return derivative_norm_impl(f, nullptr, dim, s, j, p);
}

double derivative_norm(const DerivativeSource& f, const Jet& p_jet, const Ball& s, int j, double p) {
  return derivative_norm_impl(f, &p_jet, p_jet.dim(), s, j, p);
}

double sobolev_seminorm(const TestFunction& theta, const NormSpec& spec) {
  return sobolev_seminorm(theta, spec.i, spec.p);
}

double sobolev_seminorm(const TestFunction& theta, int i, double p) {
  if (!(p >= 1.0)) fail(ErrorCode::UnsupportedExponent, "exponent must lie in [1, inf]");
  if (theta.is_zero()) return 0.0;
  const int dim = theta.dim();
  const auto alphas = enumerate_multiindices(dim, i);
  std::vector<TestFunction> ders;
  for (const auto& a : alphas) ders.push_back(theta.derivative(a));
  std::vector<double> vals(alphas.size());
  auto norm_at = [&](const Point& x) {
    for (std::size_t t = 0; t < ders.size(); ++t) vals[t] = ders[t](x);
    return tensor_norm(dim, i, vals.data());
  };
  if (std::isinf(p)) {
    const Box box = theta.support_box();
    const int nodes = dim == 1 ? 4097 : 401;
    double m = 0.0;
    for (int jy = 0; jy < (dim == 2 ? nodes : 1); ++jy)
      for (int jx = 0; jx < nodes; ++jx) {
        Point x{box.lo[0] + (box.hi[0] - box.lo[0]) * jx / (nodes - 1), 0.0};
        if (dim == 2) x[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * jy / (nodes - 1);
        m = std::max(m, norm_at(x));
      }
    return m;
  }
  return std::pow(integrate_over_support(theta, [&](const Point& x) { return power_of(norm_at(x), p); }), 1.0 / p);
}

// ---------------------------------------------------------------------------

Jet poincare_polynomial(const DerivativeSource& f, int dim, const Ball& s, int k) {
  require(k >= 0, "order must be nonnegative");
  Jet result(dim, s.center, k - 1);
  if (k == 0) return result;
  const SampledField base = f(MultiIndex::zero(dim));
  const auto quad = region_quadrature(base.grid(), s);
  if (quad.empty()) fail(ErrorCode::EmptyRegion, "region contains no grid nodes");
  double volume = 0.0;
  for (const auto& nw : quad) volume += nw.weight;
  const Grid& g = base.grid();
  for (int level = k - 1; level >= 0; --level) {
    for (const auto& beta : enumerate_multiindices(dim, level)) {
      const SampledField d = level == 0 ? base : f(beta);
      const Jet dp = result.derivative(beta);
      double acc = 0.0;
      for (const auto& nw : quad) acc += nw.weight * (d[nw.index] - dp(g.point(nw.index)));
      // Lower levels are still zero, so D^β of the current polynomial is exact here.
      result.set_coeff(beta, acc / volume);
    }
  }
  return result;
}

Jet poincare_polynomial(const SampledField& f, const Ball& s, int k) {
  return poincare_polynomial(finite_differences(f), f.grid().dim(), s, k);
}

VerifierReport verify_poincare(const DerivativeSource& f, int dim, const Ball& s, int k, double p,
                               double slack) {
  require(k >= 1, "order must be at least one");
  VerifierReport rep;
  rep.inequality = "|D^i(f - P)|_p <= (2^n r)^(k-i) |D^k f|_p";
  rep.parameters = {{"k", k}, {"p", p}, {"radius", s.radius}, {"dim", dim}};
  const Jet poly = poincare_polynomial(f, dim, s, k);
  const double top = derivative_norm(f, dim, s, k, p);
  for (int i = 0; i < k; ++i) {
    const double lhs = derivative_norm(f, poly, s, i, p);
    const double bound = std::pow(std::ldexp(s.radius, dim), k - i) * top;
    rep.add_le("i=" + std::to_string(i), lhs, bound, slack * std::max(1.0, bound));
  }
  rep.summary["polynomial"] = poly.str();
  rep.summary["top_norm"] = top;
  return rep;
}

VerifierReport verify_poincare(const SampledField& f, const Ball& s, int k, double p, double slack) {
  return verify_poincare(finite_differences(f), f.grid().dim(), s, k, p, slack);
}

VerifierReport verify_zero_boundary_poincare(const TestFunction& theta, const Ball& s, int k, int j, double p,
                                             double slack) {
  require(k >= 0 && j >= 0 && j <= k, "need 0 <= j <= k");
  if (!theta.support_inside(s)) fail(ErrorCode::SupportViolation, "test function is not supported in the region");
  VerifierReport rep;
  rep.inequality = "|D^j theta|_p <= r^(k-j) |D^k theta|_p";
  rep.parameters = {{"k", k}, {"j", j}, {"p", p}, {"radius", s.radius}};
  const double lhs = sobolev_seminorm(theta, j, p);
  const double bound = std::pow(s.radius, k - j) * sobolev_seminorm(theta, k, p);
  rep.add_le("j=" + std::to_string(j), lhs, bound, slack * std::max(1.0, bound));
  return rep;
}

double interpolation_constant(const SampledField& u, const Ball& s, int i, int k, double p, double eps) {
  require(0 <= i && i <= k, "need 0 <= i <= k");
  const auto src = finite_differences(u);
  const int dim = u.grid().dim();
  const double base = derivative_norm(src, dim, s, 0, p);
  if (base == 0.0) return 0.0;
  const double lhs = std::pow(s.radius, i) * derivative_norm(src, dim, s, i, p);
  const double top = eps * std::pow(s.radius, k) * derivative_norm(src, dim, s, k, p);
  return std::max(0.0, (lhs - top) / base);
}

InterpolationResult verify_interpolation(const std::vector<FamilyMember>& family, const Grid& grid, const Ball& s,
                                         int i, int k, double p, double eps) {
  require(!family.empty(), "interpolation family is empty");
  require(eps > 0.0, "epsilon must be positive");
  InterpolationResult res;
  res.report.inequality = "r^i|D^i u|_p <= eps r^k |D^k u|_p + C |u|_p";
  res.report.parameters = {{"i", i}, {"k", k}, {"p", p}, {"eps", eps}, {"radius", s.radius}};
  std::array<double, 2> c{0.0, 0.0};
  for (int level = 0; level < 2; ++level) {
    const Grid g = grid.refined(level);
    for (const auto& u : family)
      c[level] = std::max(c[level], interpolation_constant(SampledField::sample(g, u), s, i, k, p, eps));
  }
  res.c_coarse = c[0];
  res.c_fine = c[1];
  const double ref = std::max(c[0], c[1]);
  const double drift = ref > 0.0 ? std::abs(c[1] - c[0]) / ref : 0.0;
  res.report.add("C on grid", c[0], ref, std::isfinite(c[0]));
  res.report.add("C on refined grid", c[1], ref, std::isfinite(c[1]));
  res.report.add_le("refinement drift", drift, 0.10);
  res.report.summary["constant"] = ref;
  return res;
}

VerifierReport verify_derivative_shift(const SampledField& t, const Ball& s, int k, double p) {
  require(k >= 0, "order must be nonnegative");
  VerifierReport rep;
  rep.inequality = "|D^alpha T|_{-k,p} <= r^(k-|alpha|) |T|_p";
  rep.parameters = {{"k", k}, {"p", p}, {"radius", s.radius}};
  const double base = lp_norm(t, s, p);
  const auto method = p == 2.0 ? DualMethod::Riesz : DualMethod::Optimization;
  const DistributionRep tr = DistributionRep::from_field(t);
  for (int j = 0; j <= k; ++j) {
    for (const auto& alpha : enumerate_multiindices(t.grid().dim(), j)) {
      const double lhs = dual_norm(tr.derivative(alpha), s, {k, p}, method);
      const double bound = std::pow(s.radius, k - j) * base;
      rep.add_le("alpha=" + alpha.str(), lhs, bound, 1e-6 * std::max(1e-12, bound));
    }
  }
  return rep;
}

}  // namespace jetscope::norms
