#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "jetscope/distribution.hpp"
#include "jetscope/grid.hpp"

namespace jetscope {

/// A ball or an axis-aligned box.
struct Region {
  std::variant<Ball, Box> shape;

  Region(Ball b) : shape(b) {}  // NOLINT(google-explicit-constructor)
  Region(Box b) : shape(b) {}   // NOLINT(google-explicit-constructor)

  bool is_ball() const noexcept { return std::holds_alternative<Ball>(shape); }
  const Ball& ball() const { return std::get<Ball>(shape); }
  const Box& box() const { return std::get<Box>(shape); }
  /// Signed distance-like margin: positive inside, in length units.
  double depth(const Point& p, int dim) const noexcept;
  Box bounds(int dim) const noexcept;
};

/// The discrete zero-exterior test space of order i on a region: grid nodes at
/// depth > (i − 1) h / 2 for i ≥ 1, and the closed region with trapezoid
/// weights for i = 0. Everything outside the node set is held at zero.
class MaskedRegion {
 public:
  MaskedRegion(const Grid& grid, const Region& region, int order);

  const Grid& grid() const noexcept { return grid_; }
  const Region& region() const noexcept { return region_; }
  int order() const noexcept { return order_; }
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Quadrature weight per node (h^n, or trapezoid region weights for order 0).
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

  /// Rectangular index window holding the nodes plus a zero halo of width
  /// `order` on every side. It may extend past the grid box.
  std::array<int, 2> lattice_lo() const noexcept { return lat_lo_; }
  std::array<int, 2> lattice_count() const noexcept { return lat_n_; }
  /// Lattice-local position of each node.
  const std::vector<std::size_t>& lattice_index() const noexcept { return lat_idx_; }
  std::size_t lattice_size() const noexcept;

  SampledField scatter(const Eigen::VectorXd& values) const;
  Eigen::VectorXd gather(const SampledField& field) const;

 private:
  Grid grid_;
  Region region_;
  int order_;
  std::vector<std::size_t> nodes_;
  Eigen::VectorXd weights_;
  std::array<int, 2> lat_lo_{};
  std::array<int, 2> lat_n_{1, 1};
  std::vector<std::size_t> lat_idx_;
};

/// b_j = T(e_j): the distribution as a linear functional on the node basis.
/// Field terms contribute w ⊙ D_h^β f, atoms their multilinear (or finite
/// difference) weights, polynomial terms w ⊙ P.
Eigen::VectorXd functional_vector(const DistributionRep& t, const MaskedRegion& mask);

/// (L^i)[mask, mask] where L is the 3/5-point Laplacian on the full lattice.
/// With unit_spacing the stencil is scaled by h_0^2, so the result is
/// h_0^{2i} times the operator and has exact integer entries on square grids.
Eigen::SparseMatrix<double> polylaplacian_matrix(const MaskedRegion& mask, int i, bool unit_spacing = false);

/// The L^q norm of the forward-difference tensor D_h^i θ over the lattice,
/// with the inner-product tensor norm Σ_α (i!/α!)(δ^α θ)^2. For q = 2 its
/// square equals h^n θᵀ(−1)^i A θ with A from polylaplacian_matrix.
class DifferenceEnergy {
 public:
  DifferenceEnergy(const MaskedRegion& mask, int i, double q);

  /// (Σ h^n ‖δ^i θ‖^q), i.e. the q-th power of the norm.
  double power(const Eigen::VectorXd& theta) const;
  double norm(const Eigen::VectorXd& theta) const;
  /// Gradient of power(θ).
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  /// power and gradient together.
  double power_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

 private:
  double compute(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;
  void forward(std::vector<double>& lat, int axis) const;
  void adjoint(std::vector<double>& lat, int axis) const;

  const MaskedRegion& mask_;
  int i_;
  double q_;
  std::vector<MultiIndex> alphas_;
  std::vector<double> multinomials_;
};

}  // namespace jetscope
