#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SparseCholesky>

#include "jetscope/error.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/pde.hpp"

namespace jetscope::norms {

namespace {

/// ‖b/w‖ in the weighted L^p space, the exact dual value for order zero.
double weighted_density_norm(const Eigen::VectorXd& b, const Eigen::VectorXd& w, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) m = std::max(m, std::abs(b[k]) / w[k]);
    return m;
  }
  double acc = 0.0;
  for (Eigen::Index k = 0; k < b.size(); ++k) acc += w[k] * std::pow(std::abs(b[k]) / w[k], p);
  return std::pow(acc, 1.0 / p);
}

struct Objective {
  const DifferenceEnergy& energy;
  const Eigen::VectorXd& b;
  double q;

  /// J(θ) = g(θ)^q / q − bᵀθ and its gradient.
  double eval(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const double pw = energy.power_and_gradient(theta, grad);
    grad /= q;
    grad -= b;
    return pw / q - b.dot(theta);
  }
};

/// Root of φ'(t) = ∇J(θ + t d)·d for t > 0 by bracketing and Illinois secant.
double line_search(const Objective& obj, const Eigen::VectorXd& theta, const Eigen::VectorXd& d, double slope0,
                   double t_guess, Eigen::VectorXd& scratch_grad) {
  auto dphi = [&](double t) {
    obj.eval(theta + t * d, scratch_grad);
    return scratch_grad.dot(d);
  };
  double ta = 0.0, fa = slope0;
  double tb = t_guess, fb = dphi(tb);
  int expand = 0;
  while (fb < 0.0 && expand < 60) {
    ta = tb;
    fa = fb;
    tb *= 4.0;
    fb = dphi(tb);
    ++expand;
  }
  if (fb < 0.0) return tb;
  const double target = 1e-4 * std::abs(slope0);
  int side = 0;
  double t = tb;
  for (int it = 0; it < 60; ++it) {
    t = (ta * fb - tb * fa) / (fb - fa);
    if (!(t > ta && t < tb)) t = 0.5 * (ta + tb);
    const double ft = dphi(t);
    if (std::abs(ft) <= target) break;
    if (ft < 0.0) {
      ta = t;
      fa = ft;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      tb = t;
      fb = ft;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  return t;
}

}  // namespace

namespace {

/// A fixed SPD metric for the search. For q = 2 and i ≥ 2 the order-(i − 1)
/// operator on the same node set, which removes two powers of the mesh size
/// from the condition number while staying independent of the direct solve.
/// For q ≠ 2 the order-i quadratic form itself.
class Preconditioner {
 public:
  Preconditioner(const MaskedRegion& mask, int i, double q) {
    const int order = q == 2.0 ? i - 1 : i;
    if (order < 1) return;
    const double sign = order % 2 ? -1.0 : 1.0;
    Eigen::SparseMatrix<double> m = polylaplacian_matrix(mask, order) * (sign * mask.grid().cell_volume());
    ldlt_.emplace(m);
    if (ldlt_->info() != Eigen::Success) fail(ErrorCode::SingularSystem, "preconditioner factorization failed");
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const { return ldlt_ ? Eigen::VectorXd(ldlt_->solve(g)) : g; }

 private:
  std::optional<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

}  // namespace

DualResult maximize_pairing(const MaskedRegion& mask, const Eigen::VectorXd& b, int i, double q) {
  require(b.size() == static_cast<Eigen::Index>(mask.size()), "functional length does not match region");
  if (!(q > 1.0 && std::isfinite(q)))
    fail(ErrorCode::UnsupportedExponent, "optimization route needs 1 < p < inf");
  DualResult res;
  if (b.norm() == 0.0) return res;

  const double p = conjugate(q);
  const DifferenceEnergy energy(mask, i, q);
  const Objective obj{energy, b, q};
  const Preconditioner precond(mask, i, q);
  const double upper = i == 0 ? weighted_density_norm(b, mask.weights(), p) : 0.0;
  const double bscale = std::sqrt(b.dot(precond.apply(b)));

  Eigen::VectorXd theta = precond.apply(b);
  {
    // Best multiple of the start along its own ray.
    const double c = std::pow(b.dot(theta) / energy.power(theta), 1.0 / (q - 1.0));
    theta *= c;
  }
  Eigen::VectorXd grad(b.size()), grad_new(b.size()), scratch(b.size());
  double j_value = obj.eval(theta, grad);
  Eigen::VectorXd s = precond.apply(grad);
  Eigen::VectorXd d = -s;
  double gs = grad.dot(s);
  double t_guess = 1.0;
  double lower = 0.0, gap = std::numeric_limits<double>::infinity(), stationarity = 1.0;
  const int max_iter = std::max(20000, 40 * static_cast<int>(b.size()));
  const int restart = std::max(50, static_cast<int>(b.size()));
  int it = 0;
  int stall = 0;
  double best = j_value;
  bool converged = false;
  for (; it < max_iter; ++it) {
    const double g = energy.norm(theta);
    lower = g > 0.0 ? b.dot(theta) / g : 0.0;
    stationarity = std::sqrt(std::max(0.0, gs)) / bscale;
    if (i == 0) {
      gap = (upper - lower) / upper;
      if (gap <= 1e-7) {
        converged = true;
        break;
      }
    } else if (stationarity <= 1e-9) {
      converged = true;
      break;
    }
    if (j_value < best - 1e-15 * std::abs(best)) {
      best = j_value;
      stall = 0;
    } else if (++stall > 200) {
      break;
    }
    double slope0 = grad.dot(d);
    if (slope0 >= 0.0) {
      d = -s;
      slope0 = -gs;
    }
    const double t = line_search(obj, theta, d, slope0, t_guess, scratch);
    theta += t * d;
    t_guess = t;
    j_value = obj.eval(theta, grad_new);
    const Eigen::VectorXd s_new = precond.apply(grad_new);
    const double gs_new = grad_new.dot(s_new);
    const double beta = (it + 1) % restart == 0 ? 0.0 : std::max(0.0, (gs_new - grad_new.dot(s)) / gs);
    d = -s_new + beta * d;
    grad.swap(grad_new);
    s = s_new;
    gs = gs_new;
  }
  res.value = lower;
  res.iterations = it;
  res.theta = theta / energy.norm(theta);
  if (i == 0) {
    res.upper = upper;
    res.gap = gap;
    if (gap > 1e-4) fail(ErrorCode::SolverDivergence, "duality gap did not close");
  } else {
    res.upper = lower;
    res.gap = stationarity;
    if (!converged && stationarity > 1e-4) fail(ErrorCode::SolverDivergence, "pairing maximization did not converge");
  }
  return res;
}

DualResult dual_norm_detailed(const DistributionRep& t, const Grid& grid, const Ball& s, const NormSpec& spec,
                              DualMethod method) {
  require(grid.dim() == t.dim(), "grid and distribution dimensions differ");
  const MaskedRegion mask(grid, Region(s), spec.i);
  if (mask.size() == 0) fail(ErrorCode::EmptyRegion, "region contains no admissible grid nodes");
  const Eigen::VectorXd b = functional_vector(t, mask);
  DualResult res;
  if (spec.i == 0 && (spec.p == 1.0 || std::isinf(spec.p) || method == DualMethod::Riesz)) {
    if (method == DualMethod::Riesz && spec.p != 2.0)
      fail(ErrorCode::UnsupportedExponent, "Riesz route needs p = 2");
    res.value = res.upper = weighted_density_norm(b, mask.weights(), spec.p);
    return res;
  }
  if (method == DualMethod::Riesz) {
    if (spec.p != 2.0) fail(ErrorCode::UnsupportedExponent, "Riesz route needs p = 2");
    const auto solver = pde::riesz_solver(grid, Region(s), spec.i);
    const double v2 = b.dot(solver->solve(b));
    res.value = res.upper = std::sqrt(std::max(0.0, v2));
    return res;
  }
  if (spec.p == 1.0 || std::isinf(spec.p))
    fail(ErrorCode::UnsupportedExponent, "p in {1, inf} is only supported at order zero");
  return maximize_pairing(mask, b, spec.i, spec.q());
}

DualResult dual_norm_detailed(const DistributionRep& t, const Ball& s, const NormSpec& spec, DualMethod method) {
  const Grid* g = t.grid();
  if (!g) fail(ErrorCode::MissingDerivativeData, "distribution carries no grid; pass one explicitly");
  return dual_norm_detailed(t, *g, s, spec, method);
}

double dual_norm(const DistributionRep& t, const Ball& s, const NormSpec& spec, DualMethod method) {
  return dual_norm_detailed(t, s, spec, method).value;
}

double dual_norm(const DistributionRep& t, const Grid& grid, const Ball& s, const NormSpec& spec,
                 DualMethod method) {
  return dual_norm_detailed(t, grid, s, spec, method).value;
}

}  // namespace jetscope::norms
