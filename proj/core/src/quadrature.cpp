#include "jetscope/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "jetscope/error.hpp"

namespace jetscope {

QuadratureRule gauss_legendre(int n, double a, double b) {
  require(n >= 1, "quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(k)] = mid - half * x;
    rule.nodes[static_cast<std::size_t>(n - 1 - k)] = mid + half * x;
    rule.weights[static_cast<std::size_t>(k)] = half * w;
    rule.weights[static_cast<std::size_t>(n - 1 - k)] = half * w;
  }
  return rule;
}

double trapezoid(const std::function<double(const Point&)>& fn, int dim, const Box& box,
                 int nodes_per_axis) {
  require(nodes_per_axis >= 2, "trapezoid needs at least two nodes per axis");
  const int m = nodes_per_axis;
  const double hx = (box.hi[0] - box.lo[0]) / (m - 1);
  if (dim == 1) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      acc += w * fn({box.lo[0] + i * hx, 0.0});
    }
    return acc * hx;
  }
  const double hy = (box.hi[1] - box.lo[1]) / (m - 1);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const double wy = (j == 0 || j == m - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int i = 0; i < m; ++i) {
      const double wx = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      row += wx * fn({box.lo[0] + i * hx, box.lo[1] + j * hy});
    }
    acc += wy * row;
  }
  return acc * hx * hy;
}

double integrate_over_support(const TestFunction& theta,
                              const std::function<double(const Point&)>& integrand) {
  if (theta.is_zero()) return 0.0;
  const int nodes = theta.dim() == 1 ? 4097 : 401;
  return trapezoid(integrand, theta.dim(), theta.support_box(), nodes);
}

}  // namespace jetscope
