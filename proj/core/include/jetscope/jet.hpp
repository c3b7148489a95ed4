#pragma once

#include <map>
#include <string>

#include "jetscope/grid.hpp"
#include "jetscope/multi_index.hpp"
#include "jetscope/polynomial.hpp"

namespace jetscope {

/// P(x) = Σ_{|β| ≤ k} c_β (x − a)^β / β!, anchored at a. Degree −1 is the zero
/// polynomial.
class Jet {
 public:
  Jet() = default;
  Jet(int dim, Point basepoint, int degree);

  static Jet zero(int dim, Point basepoint) { return Jet(dim, basepoint, -1); }
  static Jet constant(int dim, Point basepoint, double c);
  /// Jet whose coefficients are the derivatives of a polynomial in (x − a).
  static Jet from_polynomial(const Polynomial& in_local, Point basepoint, int degree);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  const Point& basepoint() const noexcept { return a_; }
  double coeff(const MultiIndex& beta) const;
  void set_coeff(const MultiIndex& beta, double c);
  const std::map<MultiIndex, double>& coeffs() const noexcept { return c_; }

  double operator()(const Point& x) const;
  /// The polynomial in the local variable y = x − a.
  Polynomial local_polynomial() const;

  Jet derivative(const MultiIndex& beta) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(double s) const;

  std::string str() const;

 private:
  int dim_ = 1;
  Point a_{};
  int degree_ = -1;
  std::map<MultiIndex, double> c_;
};

inline double eval_jet(const Jet& p, const Point& x) { return p(x); }
inline Jet differentiate_jet(const Jet& p, const MultiIndex& beta) { return p.derivative(beta); }

}  // namespace jetscope
