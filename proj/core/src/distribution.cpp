#include "jetscope/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "jetscope/error.hpp"
#include "jetscope/quadrature.hpp"

namespace jetscope {

DistributionRep DistributionRep::from_field(SampledField f, MultiIndex beta, double c) {
  DistributionRep t(f.grid().dim());
  t.add_field(std::move(f), beta, c);
  return t;
}

DistributionRep DistributionRep::dirac(int dim, Point x, double weight) {
  DistributionRep t(dim);
  t.add_atom(x, weight);
  return t;
}

DistributionRep DistributionRep::from_jet(const Jet& p) {
  DistributionRep t(p.dim());
  t.add_polynomial(p);
  return t;
}

void DistributionRep::adopt_grid(const Grid& g) {
  require(g.dim() == dim_, "field dimension does not match distribution");
  if (!grid_)
    grid_ = g;
  else
    require(grid_->same_as(g), "all field terms must share one grid");
}

DistributionRep& DistributionRep::add_field(SampledField f, MultiIndex beta, double c) {
  if (beta.order() == 0) beta = MultiIndex::zero(dim_);
  require(beta.dim() == dim_, "term index dimension mismatch");
  adopt_grid(f.grid());
  fields_.push_back({beta, std::move(f), c});
  return *this;
}

DistributionRep& DistributionRep::add_atom(Point x, double weight, MultiIndex beta) {
  if (beta.order() == 0) beta = MultiIndex::zero(dim_);
  require(beta.dim() == dim_, "atom index dimension mismatch");
  require(std::isfinite(weight) && std::isfinite(x[0]) && std::isfinite(x[1]), "atom must be finite");
  if (dim_ == 1) x[1] = 0.0;
  atoms_.push_back({x, weight, beta});
  return *this;
}

DistributionRep& DistributionRep::add_polynomial(const Jet& p, double c) {
  require(p.dim() == dim_, "polynomial dimension mismatch");
  polys_.push_back({p, c});
  return *this;
}

int DistributionRep::max_order() const noexcept {
  int m = 0;
  for (const auto& f : fields_) m = std::max(m, f.beta.order());
  for (const auto& a : atoms_) m = std::max(m, a.beta.order());
  return m;
}

DistributionRep DistributionRep::derivative(const MultiIndex& beta) const {
  require(beta.dim() == dim_, "derivative index dimension mismatch");
  DistributionRep t = *this;
  for (auto& f : t.fields_) f.beta = f.beta.plus(beta);
  for (auto& a : t.atoms_) a.beta = a.beta.plus(beta);
  for (auto& p : t.polys_) p.jet = p.jet.derivative(beta);
  return t;
}

DistributionRep DistributionRep::minus(const Jet& p) const {
  DistributionRep t = *this;
  if (p.degree() >= 0) t.add_polynomial(p, -1.0);
  return t;
}

DistributionRep DistributionRep::operator+(const DistributionRep& o) const {
  require(dim_ == o.dim_, "distribution dimension mismatch");
  DistributionRep t = *this;
  for (const auto& f : o.fields_) t.add_field(f.field, f.beta, f.coefficient);
  for (const auto& a : o.atoms_) t.add_atom(a.location, a.weight, a.beta);
  for (const auto& p : o.polys_) t.add_polynomial(p.jet, p.coefficient);
  return t;
}

DistributionRep DistributionRep::operator-(const DistributionRep& o) const { return *this + o * -1.0; }

DistributionRep DistributionRep::operator*(double s) const {
  DistributionRep t = *this;
  for (auto& f : t.fields_) f.coefficient *= s;
  for (auto& a : t.atoms_) a.weight *= s;
  for (auto& p : t.polys_) p.coefficient *= s;
  return t;
}

namespace {

/// Σ_nodes h^n g(x) over the grid nodes inside the support box of θ.
template <class Fn>
double grid_sum(const Grid& g, const TestFunction& theta, Fn&& fn) {
  const Box box = theta.support_box();
  const auto rx = g.node_range(0, box.lo[0], box.hi[0]);
  std::array<int, 2> ry{0, 0};
  if (g.dim() == 2) ry = g.node_range(1, box.lo[1], box.hi[1]);
  double acc = 0.0;
  for (int j = ry[0]; j <= ry[1]; ++j) {
    double row = 0.0;
    for (int i = rx[0]; i <= rx[1]; ++i) row += fn(g.index(i, j), g.point(i, j));
    acc += row;
  }
  return acc * g.cell_volume();
}

}  // namespace

double pair(const DistributionRep& t, const TestFunction& theta, const Ball& region) {
  require(theta.dim() == t.dim(), "test function dimension mismatch");
  const double scale = std::max(1.0, region.radius);
  if (!theta.support_inside(region, 1e-12 * scale))
    fail(ErrorCode::SupportViolation, "test function support leaves the pairing region");
  return pair(t, theta);
}

double pair(const DistributionRep& t, const TestFunction& theta) {
  require(theta.dim() == t.dim(), "test function dimension mismatch");
  if (theta.is_zero()) return 0.0;
  if (t.max_order() > kMaxPairingOrder)
    fail(ErrorCode::MissingDerivativeData, "distribution order exceeds available test function derivatives");
  const Grid* g = t.grid();
  if (g) {
    const double slack = 1e-12 * std::max(1.0, g->hi(0) - g->lo(0));
    if (!theta.support_inside(g->box(), slack))
      fail(ErrorCode::SupportViolation, "test function support leaves the grid box");
  }
  double total = 0.0;
  for (const auto& term : t.fields()) {
    const TestFunction d = term.beta.order() ? theta.derivative(term.beta) : theta;
    const double sign = term.beta.order() % 2 ? -1.0 : 1.0;
    const auto vals = term.field.values();
    total += sign * term.coefficient *
             grid_sum(*g, d, [&](std::size_t idx, const Point& x) { return vals[idx] * d(x); });
  }
  for (const auto& atom : t.atoms()) {
    const TestFunction d = atom.beta.order() ? theta.derivative(atom.beta) : theta;
    const double sign = atom.beta.order() % 2 ? -1.0 : 1.0;
    total += sign * atom.weight * d(atom.location);
  }
  for (const auto& poly : t.polynomials()) {
    if (poly.jet.degree() < 0) continue;
    const Polynomial local = poly.jet.local_polynomial();
    const Point a = poly.jet.basepoint();
    auto integrand = [&](const Point& x) {
      return local({x[0] - a[0], x[1] - a[1]}) * theta(x);
    };
    const double v = g ? grid_sum(*g, theta, [&](std::size_t, const Point& x) { return integrand(x); })
                       : integrate_over_support(theta, integrand);
    total += poly.coefficient * v;
  }
  return total;
}

}  // namespace jetscope
