#pragma once

#include <vector>

#include "jetscope/grid.hpp"
#include "jetscope/multi_index.hpp"
#include "jetscope/polynomial.hpp"

namespace jetscope {

/// One summand N(z) s(z)^{-m} Φ(z), z = (x − c)/ρ, s = 1 − |z|², Φ = exp(−1/s).
struct BumpPiece {
  Point center{};
  double radius = 1.0;
  Polynomial numerator{1};
  int power = 0;
};

/// Symbolic compactly supported test function: a finite sum of bump pieces.
/// Derivatives stay in the same family, so every order is exact.
class TestFunction {
 public:
  explicit TestFunction(int dim = 1) : dim_(dim) {}

  /// The standard profile Φ(x) = exp(−1/(1 − |x|²)) on |x| < 1.
  static TestFunction standard(int dim);
  static TestFunction bump(int dim, Point center, double radius, double amplitude = 1.0);
  /// N(z) Φ(z) for a numerator given in the local variable z.
  static TestFunction rational(int dim, Polynomial numerator, int power, Point center = {},
                               double radius = 1.0);

  int dim() const noexcept { return dim_; }
  const std::vector<BumpPiece>& pieces() const noexcept { return pieces_; }
  bool is_zero() const noexcept { return pieces_.empty(); }

  double operator()(const Point& x) const;

  TestFunction derivative(int axis) const;
  TestFunction derivative(const MultiIndex& beta) const;
  /// x ↦ x_axis θ(x)
  TestFunction coordinate_multiply(int axis) const;
  /// x ↦ P(x) θ(x) for a polynomial in global coordinates.
  TestFunction multiply(const Polynomial& p) const;
  /// x ↦ θ((x − a)/r)
  TestFunction rescaled(const Point& a, double r) const;

  TestFunction operator+(const TestFunction& o) const;
  TestFunction operator-(const TestFunction& o) const;
  TestFunction operator*(double s) const;

  /// Open balls whose union is the support.
  std::vector<Ball> support() const;
  Box support_box() const;
  bool support_inside(const Ball& region, double slack = 1e-12) const;
  bool support_inside(const Box& box, double slack = 1e-12) const;

 private:
  void merge(BumpPiece piece);

  int dim_;
  std::vector<BumpPiece> pieces_;
};

inline TestFunction coordinate_multiply(const TestFunction& theta, int axis) {
  return theta.coordinate_multiply(axis);
}

}  // namespace jetscope
