#include "jetscope/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "jetscope/error.hpp"

namespace jetscope {

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(MultiIndex::zero(dim), c);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& beta, double c) {
  Polynomial p(beta.dim());
  p.add_term(beta, c);
  return p;
}

Polynomial Polynomial::coordinate(int dim, int axis) { return monomial(MultiIndex::unit(dim, axis)); }

int Polynomial::degree() const noexcept {
  int d = -1;
  for (const auto& [beta, c] : terms_) d = std::max(d, beta.order());
  return d;
}

double Polynomial::coeff(const MultiIndex& beta) const {
  const auto it = terms_.find(beta);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& beta, double c) {
  require(beta.dim() == dim_, "polynomial term dimension mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(beta, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(const Point& z) const {
  if (terms_.empty()) return 0.0;
  const int deg = degree();
  // Power tables avoid std::pow in the inner loop.
  double px[32], py[32];
  const int cap = std::min(deg, 31);
  px[0] = py[0] = 1.0;
  for (int e = 1; e <= cap; ++e) {
    px[e] = px[e - 1] * z[0];
    py[e] = py[e - 1] * z[1];
  }
  double acc = 0.0;
  for (const auto& [beta, c] : terms_) {
    const double a = beta[0] <= cap ? px[beta[0]] : std::pow(z[0], beta[0]);
    const double b = dim_ == 1 ? 1.0 : (beta[1] <= cap ? py[beta[1]] : std::pow(z[1], beta[1]));
    acc += c * a * b;
  }
  return acc;
}

Polynomial Polynomial::derivative(int axis) const {
  require(axis >= 0 && axis < dim_, "axis out of range");
  Polynomial d(dim_);
  for (const auto& [beta, c] : terms_) {
    const int e = beta[axis];
    if (e == 0) continue;
    d.add_term(beta.minus(MultiIndex::unit(dim_, axis)), c * e);
  }
  return d;
}

Polynomial Polynomial::derivative(const MultiIndex& beta) const {
  Polynomial d = *this;
  for (int a = 0; a < beta.dim(); ++a)
    for (int t = 0; t < beta[a]; ++t) d = d.derivative(a);
  return d;
}

Polynomial Polynomial::affine(const Point& c, double s) const {
  // Substitute x_a = c_a + s z_a term by term.
  Polynomial out(dim_);
  for (const auto& [beta, coef] : terms_) {
    Polynomial term = constant(dim_, coef);
    for (int a = 0; a < dim_; ++a) {
      Polynomial lin = constant(dim_, c[a]) + coordinate(dim_, a) * s;
      for (int e = 0; e < beta[a]; ++e) term = term * lin;
    }
    out = out + term;
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require(dim_ == o.dim_, "polynomial dimension mismatch");
  Polynomial r = *this;
  for (const auto& [beta, c] : o.terms_) r.add_term(beta, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require(dim_ == o.dim_, "polynomial dimension mismatch");
  Polynomial r(dim_);
  for (const auto& [b1, c1] : terms_)
    for (const auto& [b2, c2] : o.terms_) r.add_term(b1.plus(b2), c1 * c2);
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(dim_);
  if (s == 0.0) return r;
  for (const auto& [beta, c] : terms_) r.terms_.emplace(beta, c * s);
  return r;
}

Polynomial one_minus_norm_squared(int dim) {
  Polynomial p = Polynomial::constant(dim, 1.0);
  for (int a = 0; a < dim; ++a) p.add_term(MultiIndex::unit(dim, a).plus(MultiIndex::unit(dim, a)), -1.0);
  return p;
}

}  // namespace jetscope
