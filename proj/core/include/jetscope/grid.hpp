#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "jetscope/multi_index.hpp"

namespace jetscope {

/// Points live in ℝ^n with n ∈ {1, 2}; the unused coordinate is zero.
using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b, int dim) noexcept;

struct Ball {
  Point center{};
  double radius = 1.0;
  bool closed = false;

  Ball() = default;
  Ball(Point c, double r, bool is_closed = false);
  static Ball around(double c, double r) { return Ball({c, 0.0}, r); }
  static Ball around(double cx, double cy, double r) { return Ball({cx, cy}, r); }

  bool contains(const Point& p, int dim, double slack = 0.0) const noexcept;
  /// True when this ball lies inside `outer` (closure comparison, tolerance `slack`).
  bool inside(const Ball& outer, int dim, double slack = 1e-12) const noexcept;
};

struct Box {
  Point lo{};
  Point hi{};
};

/// Uniform tensor grid on an axis-aligned box, n ∈ {1, 2}. Node (i, j) sits at
/// lo + (i h_0, j h_1) and nodes are stored with axis 0 varying fastest.
class Grid {
 public:
  Grid(int dim, Point lo, Point hi, std::array<int, 2> nodes);
  static Grid line(double lo, double hi, int nodes);
  static Grid square(double lo, double hi, int nodes_per_axis);

  int dim() const noexcept { return dim_; }
  int nodes(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double lo(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
  double hi(int axis) const { return hi_[static_cast<std::size_t>(axis)]; }
  Box box() const { return {lo_, hi_}; }
  std::size_t size() const noexcept;
  double cell_volume() const noexcept;

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
  }
  std::array<int, 2> coords(std::size_t idx) const noexcept;
  Point point(std::size_t idx) const noexcept;
  Point point(int i, int j) const noexcept;
  double coordinate(int axis, int i) const noexcept { return lo(axis) + i * spacing(axis); }

  bool contains(const Point& p, double slack = 0.0) const noexcept;
  bool contains(const Ball& b, double slack = 1e-12) const noexcept;
  /// Index range [first, last] of nodes along `axis` within [lo, hi].
  std::array<int, 2> node_range(int axis, double lo, double hi) const noexcept;

  bool same_as(const Grid& other) const noexcept;

  /// Sub-grid spanned by the node index ranges [first, last] (inclusive).
  Grid subgrid(std::array<int, 2> first, std::array<int, 2> last) const;
  /// Nearest node index of a point, clamped into the grid.
  std::array<int, 2> nearest(const Point& p) const noexcept;
  /// Same box with each spacing divided by 2^level.
  Grid refined(int level) const;

 private:
  int dim_;
  Point lo_;
  Point hi_;
  std::array<int, 2> n_;
  std::array<double, 2> h_;
};

/// One quadrature node of a region rule.
struct NodeWeight {
  std::size_t index;
  double weight;
};

/// Composite trapezoid rule restricted to the closed ball: weight h^n per
/// node, halved per axis on the grid box faces and halved for nodes lying on
/// the sphere |x - a| = r. In 1D with endpoints on nodes this is exactly the
/// trapezoid rule on [a - r, a + r].
std::vector<NodeWeight> region_quadrature(const Grid& grid, const Ball& ball);

/// Nodes with |x - a| < r - inset, in index order.
std::vector<std::size_t> interior_nodes(const Grid& grid, const Ball& ball, double inset = 0.0);

/// A real value per grid node.
class SampledField {
 public:
  SampledField(Grid grid, std::vector<double> values);
  static SampledField zeros(const Grid& grid);
  static SampledField sample(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// D^β of the field by finite differences: order-4 central stencils in the
  /// interior, order-2 one-sided stencils within two nodes of the box faces.
  /// Orders above two are compositions of the first and second derivative.
  SampledField derivative(const MultiIndex& beta) const;

  /// Values on the sub-grid spanned by [first, last].
  SampledField window(std::array<int, 2> first, std::array<int, 2> last) const;

  /// Piecewise cubic (Lagrange, per axis) interpolation.
  double interpolate(const Point& p) const;

  SampledField operator+(const SampledField& other) const;
  SampledField operator-(const SampledField& other) const;
  SampledField operator*(double s) const;
  SampledField map(const std::function<double(const Point&, double)>& fn) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// First or second finite-difference derivative of a strided 1D line, written
/// to `out` with the same stride convention as `in`.
void differentiate_line(std::span<const double> in, std::span<double> out, int order, double h);

}  // namespace jetscope
