#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "jetscope/discrete.hpp"
#include "jetscope/distribution.hpp"
#include "jetscope/grid.hpp"
#include "jetscope/report.hpp"

namespace jetscope::pde {

/// Discrete Δ^i with zero-exterior extension on a grid region.
class StencilOperator {
 public:
  StencilOperator(const Grid& grid, const Region& region, int i);

  int power() const noexcept { return i_; }
  const MaskedRegion& mask() const noexcept { return mask_; }
  /// A = (L^i)[mask, mask], so that Δ^i u ≈ A u at mask nodes.
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return a_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return a_ * u; }

 private:
  int i_;
  MaskedRegion mask_;
  Eigen::SparseMatrix<double> a_;
};

/// Factorized SPD form K = (−1)^i h^n A of a region. K^{-1} b is the discrete
/// solution of Δ^i u = T when b is the functional vector of T, up to the sign
/// (−1)^i.
class RieszSolver {
 public:
  RieszSolver(const Grid& grid, const Region& region, int i);
  ~RieszSolver();
  RieszSolver(const RieszSolver&) = delete;
  RieszSolver& operator=(const RieszSolver&) = delete;

  const MaskedRegion& mask() const noexcept { return mask_; }
  int power() const noexcept { return i_; }
  std::size_t size() const noexcept { return mask_.size(); }
  /// K / scale(): the factorized matrix, with exact stencil entries for i ≥ 1.
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return k_; }
  double scale() const noexcept { return scale_; }

  /// K^{-1} b; throws ResidualTooLarge if the relative residual exceeds 1e−10.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  int i_;
  MaskedRegion mask_;
  Eigen::SparseMatrix<double> k_;
  double scale_ = 1.0;
  std::unique_ptr<Impl> impl_;
};

/// Cached factorization keyed by grid, region and power. Thread-safe.
std::shared_ptr<const RieszSolver> riesz_solver(const Grid& grid, const Region& region, int i);
void clear_solver_cache();
std::size_t solver_cache_size();

/// Unknown count above which the iterative solver replaces the factorization.
inline constexpr std::size_t kDirectSolveLimit = 100000;

/// u with Δ^i u = f weakly on the region and u = 0 outside.
SampledField solve_polylaplacian(const DistributionRep& f, const Grid& grid, const Region& region,
                                 int i);
SampledField solve_polylaplacian(const SampledField& f, const Region& region, int i);

/// A family member with exact derivative sampling: value of D^β u at x.
using SmoothFunction = std::function<double(const MultiIndex&, const Point&)>;

struct ProbeResult {
  /// Smallest admissible constant per grid level (coarse to fine).
  std::vector<double> constants;
  double variation = 0.0;
  VerifierReport report;
};

/// |D^{2i+k}u|_p ≤ C(|D^kΔ^iu|_p + r^{−2i−k}|u|_p) over a family, evaluated on
/// `levels` successive refinements of `grid` restricted to the ball.
ProbeResult apriori_probe_interior(const std::vector<SmoothFunction>& family, const Grid& grid,
                                   const Ball& region, int i, int k, double p, int levels = 3);

/// |D^{2i−j}u|_p ≤ C |Δ^iu|_{−j,p} for compactly supported u, with the dual
/// norm evaluated through the Riesz route on each grid level.
ProbeResult apriori_probe_zero_boundary(const std::vector<SmoothFunction>& family, const Grid& grid,
                                        const Ball& region, int i, int j, double p, int levels = 3);

}  // namespace jetscope::pde
