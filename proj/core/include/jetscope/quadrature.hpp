#pragma once

#include <functional>
#include <vector>

#include "jetscope/grid.hpp"
#include "jetscope/test_function.hpp"

namespace jetscope {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Trapezoid rule over a box with `nodes_per_axis` nodes per axis. For
/// integrands vanishing to all orders on the box faces this converges faster
/// than any power of the spacing.
double trapezoid(const std::function<double(const Point&)>& fn, int dim, const Box& box,
                 int nodes_per_axis);

/// ∫ g(θ(x), x) over the support box of θ with a resolution suited to bumps.
double integrate_over_support(const TestFunction& theta,
                              const std::function<double(const Point&)>& integrand);

}  // namespace jetscope
