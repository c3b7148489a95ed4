#include "jetscope/jet.hpp"

#include <cmath>
#include <sstream>

#include "jetscope/error.hpp"
#include "jetscope/report.hpp"

namespace jetscope {

Jet::Jet(int dim, Point basepoint, int degree) : dim_(dim), a_(basepoint), degree_(degree) {
  require(dim == 1 || dim == 2, "jet dimension must be 1 or 2");
  require(degree >= -1, "jet degree must be at least -1");
  for (int a = 0; a < 2; ++a) require(std::isfinite(basepoint[a]), "jet basepoint must be finite");
}

Jet Jet::constant(int dim, Point basepoint, double c) {
  Jet j(dim, basepoint, 0);
  j.set_coeff(MultiIndex::zero(dim), c);
  return j;
}

Jet Jet::from_polynomial(const Polynomial& in_local, Point basepoint, int degree) {
  require(in_local.degree() <= degree, "polynomial degree exceeds jet degree");
  Jet j(in_local.dim(), basepoint, degree);
  for (const auto& [beta, c] : in_local.terms()) j.set_coeff(beta, c * beta.factorial());
  return j;
}

double Jet::coeff(const MultiIndex& beta) const {
  const auto it = c_.find(beta);
  return it == c_.end() ? 0.0 : it->second;
}

void Jet::set_coeff(const MultiIndex& beta, double c) {
  require(beta.dim() == dim_, "jet coefficient dimension mismatch");
  require(beta.order() <= degree_, "jet coefficient beyond degree");
  if (c == 0.0)
    c_.erase(beta);
  else
    c_[beta] = c;
}

Polynomial Jet::local_polynomial() const {
  Polynomial p(dim_);
  for (const auto& [beta, c] : c_) p.add_term(beta, c / beta.factorial());
  return p;
}

double Jet::operator()(const Point& x) const {
  if (c_.empty()) return 0.0;
  Point y{x[0] - a_[0], dim_ == 2 ? x[1] - a_[1] : 0.0};
  return local_polynomial()(y);
}

Jet Jet::derivative(const MultiIndex& beta) const {
  require(beta.dim() == dim_, "derivative index dimension mismatch");
  const int deg = std::max(degree_ - beta.order(), -1);
  Jet d(dim_, a_, deg);
  for (const auto& [gamma, c] : c_) {
    if (!beta.fits_in(gamma)) continue;
    // D^β (y^γ/γ!) = y^{γ−β}/(γ−β)!
    d.c_[gamma.minus(beta)] = c;
  }
  return d;
}

Jet Jet::operator+(const Jet& o) const {
  require(dim_ == o.dim_ && a_ == o.a_, "jets must share dimension and basepoint");
  Jet r(dim_, a_, std::max(degree_, o.degree_));
  r.c_ = c_;
  for (const auto& [beta, c] : o.c_) {
    const double v = r.coeff(beta) + c;
    r.set_coeff(beta, v);
  }
  return r;
}

Jet Jet::operator-(const Jet& o) const { return *this + o * -1.0; }

Jet Jet::operator*(double s) const {
  Jet r(dim_, a_, degree_);
  if (s != 0.0)
    for (const auto& [beta, c] : c_) r.c_[beta] = c * s;
  return r;
}

std::string Jet::str() const {
  std::ostringstream os;
  os << "jet(deg=" << degree_ << ", a=" << format_double(a_[0]);
  if (dim_ == 2) os << "," << format_double(a_[1]);
  os << ")";
  for (const auto& [beta, c] : c_) os << " " << beta.str() << ":" << format_double(c);
  return os.str();
}

}  // namespace jetscope
