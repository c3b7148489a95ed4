#pragma once

#include <map>

#include "jetscope/grid.hpp"
#include "jetscope/multi_index.hpp"

namespace jetscope {

/// Real polynomial in n ≤ 2 variables, stored sparsely as monomial → coefficient.
class Polynomial {
 public:
  explicit Polynomial(int dim = 1) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial monomial(const MultiIndex& beta, double c = 1.0);
  /// The coordinate function z ↦ z_axis.
  static Polynomial coordinate(int dim, int axis);

  int dim() const noexcept { return dim_; }
  /// Total degree; −1 for the zero polynomial.
  int degree() const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }
  double coeff(const MultiIndex& beta) const;
  const std::map<MultiIndex, double>& terms() const noexcept { return terms_; }

  void add_term(const MultiIndex& beta, double c);

  double operator()(const Point& z) const;

  Polynomial derivative(int axis) const;
  Polynomial derivative(const MultiIndex& beta) const;
  /// z ↦ p(c + s z), used when a polynomial in x is expressed in local coordinates.
  Polynomial affine(const Point& c, double s) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

 private:
  int dim_;
  std::map<MultiIndex, double> terms_;
};

/// 1 − |z|², the denominator base of the bump family.
Polynomial one_minus_norm_squared(int dim);

}  // namespace jetscope
