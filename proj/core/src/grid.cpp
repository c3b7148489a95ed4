#include "jetscope/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jetscope/error.hpp"

namespace jetscope {

double distance(const Point& a, const Point& b, int dim) noexcept {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

Ball::Ball(Point c, double r, bool is_closed) : center(c), radius(r), closed(is_closed) {
  require(std::isfinite(r) && r > 0.0, "ball radius must be positive");
}

bool Ball::contains(const Point& p, int dim, double slack) const noexcept {
  const double d = distance(p, center, dim);
  return closed ? d <= radius + slack : d < radius + slack;
}

bool Ball::inside(const Ball& outer, int dim, double slack) const noexcept {
  return distance(center, outer.center, dim) + radius <= outer.radius + slack;
}

Grid::Grid(int dim, Point lo, Point hi, std::array<int, 2> nodes)
    : dim_(dim), lo_(lo), hi_(hi), n_(nodes), h_{1.0, 1.0} {
  require(dim == 1 || dim == 2, "grid dimension must be 1 or 2");
  for (int a = 0; a < 2; ++a) {
    if (a >= dim) {
      lo_[a] = hi_[a] = 0.0;
      n_[a] = 1;
      h_[a] = 1.0;
      continue;
    }
    require(std::isfinite(lo[a]) && std::isfinite(hi[a]) && hi[a] > lo[a], "grid box must be nonempty");
    require(nodes[a] >= 8, "grid needs at least 8 nodes per axis");
    h_[a] = (hi[a] - lo[a]) / (nodes[a] - 1);
  }
}

Grid Grid::line(double lo, double hi, int nodes) { return Grid(1, {lo, 0.0}, {hi, 0.0}, {nodes, 1}); }

Grid Grid::square(double lo, double hi, int nodes_per_axis) {
  return Grid(2, {lo, lo}, {hi, hi}, {nodes_per_axis, nodes_per_axis});
}

Grid Grid::refined(int level) const {
  require(level >= 0 && level < 16, "refinement level out of range");
  std::array<int, 2> n = n_;
  for (int a = 0; a < dim_; ++a) n[a] = (n[a] - 1) * (1 << level) + 1;
  return Grid(dim_, lo_, hi_, n);
}

std::size_t Grid::size() const noexcept {
  return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
}

double Grid::cell_volume() const noexcept { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

std::array<int, 2> Grid::coords(std::size_t idx) const noexcept {
  const auto nx = static_cast<std::size_t>(n_[0]);
  return {static_cast<int>(idx % nx), static_cast<int>(idx / nx)};
}

Point Grid::point(std::size_t idx) const noexcept {
  const auto c = coords(idx);
  return point(c[0], c[1]);
}

Point Grid::point(int i, int j) const noexcept {
  return {lo_[0] + i * h_[0], dim_ == 2 ? lo_[1] + j * h_[1] : 0.0};
}

bool Grid::contains(const Point& p, double slack) const noexcept {
  for (int a = 0; a < dim_; ++a)
    if (p[a] < lo_[a] - slack || p[a] > hi_[a] + slack) return false;
  return true;
}

bool Grid::contains(const Ball& b, double slack) const noexcept {
  for (int a = 0; a < dim_; ++a)
    if (b.center[a] - b.radius < lo_[a] - slack || b.center[a] + b.radius > hi_[a] + slack) return false;
  return true;
}

std::array<int, 2> Grid::node_range(int axis, double lo, double hi) const noexcept {
  const double h = spacing(axis);
  const double tol = 1e-9;
  int first = static_cast<int>(std::ceil((lo - lo_[axis]) / h - tol));
  int last = static_cast<int>(std::floor((hi - lo_[axis]) / h + tol));
  first = std::max(first, 0);
  last = std::min(last, n_[axis] - 1);
  return {first, last};
}

bool Grid::same_as(const Grid& o) const noexcept {
  return dim_ == o.dim_ && n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_;
}

Grid Grid::subgrid(std::array<int, 2> first, std::array<int, 2> last) const {
  Point lo = lo_, hi = hi_;
  std::array<int, 2> n{1, 1};
  for (int a = 0; a < dim_; ++a) {
    require(first[a] >= 0 && last[a] < n_[a] && last[a] > first[a], "subgrid range outside grid");
    lo[a] = lo_[a] + first[a] * h_[a];
    hi[a] = lo_[a] + last[a] * h_[a];
    n[a] = last[a] - first[a] + 1;
  }
  Grid g(dim_, lo, hi, n);
  // Keep the parent's spacing bit-for-bit.
  g.h_ = h_;
  return g;
}

std::array<int, 2> Grid::nearest(const Point& p) const noexcept {
  std::array<int, 2> c{0, 0};
  for (int a = 0; a < dim_; ++a) {
    const long k = std::lround((p[a] - lo_[a]) / h_[a]);
    c[a] = static_cast<int>(std::clamp<long>(k, 0, n_[a] - 1));
  }
  return c;
}

namespace {

double min_spacing(const Grid& g) {
  return g.dim() == 1 ? g.spacing(0) : std::min(g.spacing(0), g.spacing(1));
}

}  // namespace

std::vector<NodeWeight> region_quadrature(const Grid& grid, const Ball& ball) {
  const int n = grid.dim();
  const double tol = 1e-9 * min_spacing(grid);
  std::array<int, 2> lo{0, 0}, hi{0, 0};
  for (int a = 0; a < n; ++a) {
    const auto r = grid.node_range(a, ball.center[a] - ball.radius, ball.center[a] + ball.radius);
    lo[a] = r[0];
    hi[a] = r[1];
  }
  std::vector<NodeWeight> out;
  const double cell = grid.cell_volume();
  for (int j = lo[1]; j <= hi[1]; ++j) {
    for (int i = lo[0]; i <= hi[0]; ++i) {
      const Point x = grid.point(i, j);
      const double d = distance(x, ball.center, n);
      if (d > ball.radius + tol) continue;
      double edge = 1.0;
      if (i == 0 || i == grid.nodes(0) - 1) edge *= 0.5;
      if (n == 2 && (j == 0 || j == grid.nodes(1) - 1)) edge *= 0.5;
      // A node on the sphere that is also a grid-edge node is one trapezoid end, not two.
      if (std::abs(d - ball.radius) <= tol) edge = std::min(edge, 0.5);
      out.push_back({grid.index(i, j), cell * edge});
    }
  }
  return out;
}

std::vector<std::size_t> interior_nodes(const Grid& grid, const Ball& ball, double inset) {
  const int n = grid.dim();
  const double tol = 1e-9 * min_spacing(grid);
  const double reach = ball.radius - inset - tol;
  std::vector<std::size_t> out;
  if (reach <= 0.0) return out;
  std::array<int, 2> lo{0, 0}, hi{0, 0};
  for (int a = 0; a < n; ++a) {
    const auto r = grid.node_range(a, ball.center[a] - reach, ball.center[a] + reach);
    lo[a] = r[0];
    hi[a] = r[1];
  }
  for (int j = lo[1]; j <= hi[1]; ++j)
    for (int i = lo[0]; i <= hi[0]; ++i)
      if (distance(grid.point(i, j), ball.center, n) < reach) out.push_back(grid.index(i, j));
  return out;
}

// ---------------------------------------------------------------------------

SampledField::SampledField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "field length does not match grid node count");
  for (double v : values_) require(std::isfinite(v), "field values must be finite");
}

SampledField SampledField::zeros(const Grid& grid) {
  return SampledField(grid, std::vector<double>(grid.size(), 0.0));
}

SampledField SampledField::sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid.point(k));
  return SampledField(grid, std::move(v));
}

void differentiate_line(std::span<const double> in, std::span<double> out, int order, double h) {
  const std::size_t n = in.size();
  require(n >= 5 && out.size() == n, "derivative line too short");
  const auto f = [&](std::size_t k) { return in[k]; };
  if (order == 1) {
    const double c = 1.0 / (12.0 * h);
    out[0] = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    out[n - 1] = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    out[1] = (f(2) - f(0)) / (2.0 * h);
    out[n - 2] = (f(n - 1) - f(n - 3)) / (2.0 * h);
    for (std::size_t k = 2; k + 2 < n; ++k)
      out[k] = c * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2));
  } else if (order == 2) {
    const double h2 = h * h;
    const double c = 1.0 / (12.0 * h2);
    out[0] = (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
    out[n - 1] = (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2;
    out[1] = (f(0) - 2.0 * f(1) + f(2)) / h2;
    out[n - 2] = (f(n - 3) - 2.0 * f(n - 2) + f(n - 1)) / h2;
    for (std::size_t k = 2; k + 2 < n; ++k)
      out[k] = c * (-f(k - 2) + 16.0 * f(k - 1) - 30.0 * f(k) + 16.0 * f(k + 1) - f(k + 2));
  } else {
    fail(ErrorCode::InvalidArgument, "line derivative order must be 1 or 2");
  }
}

namespace {

void apply_axis(const Grid& g, std::vector<double>& v, int axis, int order) {
  const int nx = g.nodes(0), ny = g.nodes(1);
  const double h = g.spacing(axis);
  if (axis == 0) {
    std::vector<double> out(static_cast<std::size_t>(nx));
    for (int j = 0; j < ny; ++j) {
      std::span<double> row(v.data() + static_cast<std::size_t>(j) * nx, static_cast<std::size_t>(nx));
      differentiate_line(row, out, order, h);
      std::copy(out.begin(), out.end(), row.begin());
    }
  } else {
    std::vector<double> line(static_cast<std::size_t>(ny)), out(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) line[j] = v[g.index(i, j)];
      differentiate_line(line, out, order, h);
      for (int j = 0; j < ny; ++j) v[g.index(i, j)] = out[j];
    }
  }
}

}  // namespace

SampledField SampledField::derivative(const MultiIndex& beta) const {
  require(beta.dim() == grid_.dim(), "derivative index dimension mismatch");
  std::vector<double> v = values_;
  for (int a = 0; a < grid_.dim(); ++a) {
    const int m = beta[a];
    if (m % 2 == 1) apply_axis(grid_, v, a, 1);
    for (int t = 0; t < m / 2; ++t) apply_axis(grid_, v, a, 2);
  }
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::window(std::array<int, 2> first, std::array<int, 2> last) const {
  Grid sub = grid_.subgrid(first, last);
  std::vector<double> v(sub.size());
  for (int j = 0; j < sub.nodes(1); ++j)
    for (int i = 0; i < sub.nodes(0); ++i)
      v[sub.index(i, j)] = values_[grid_.index(first[0] + i, grid_.dim() == 2 ? first[1] + j : 0)];
  return SampledField(std::move(sub), std::move(v));
}

namespace {

/// Four-point Lagrange stencil start and weights along one axis.
int cubic_weights(const Grid& g, int axis, double x, std::array<double, 4>& w) {
  const int n = g.nodes(axis);
  const double t = (x - g.lo(axis)) / g.spacing(axis);
  int i0 = static_cast<int>(std::floor(t)) - 1;
  i0 = std::clamp(i0, 0, n - 4);
  const double s = t - i0;
  w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  w[1] = s * (s - 2) * (s - 3) / 2.0;
  w[2] = -s * (s - 1) * (s - 3) / 2.0;
  w[3] = s * (s - 1) * (s - 2) / 6.0;
  return i0;
}

}  // namespace

double SampledField::interpolate(const Point& p) const {
  std::array<double, 4> wx{}, wy{1.0, 0.0, 0.0, 0.0};
  const int i0 = cubic_weights(grid_, 0, p[0], wx);
  int j0 = 0;
  int ny = 1;
  if (grid_.dim() == 2) {
    j0 = cubic_weights(grid_, 1, p[1], wy);
    ny = 4;
  }
  double acc = 0.0;
  for (int b = 0; b < ny; ++b)
    for (int a = 0; a < 4; ++a) acc += wx[a] * wy[b] * values_[grid_.index(i0 + a, j0 + b)];
  return acc;
}

SampledField SampledField::operator+(const SampledField& o) const {
  require(grid_.same_as(o.grid_), "fields live on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] + o.values_[k];
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::operator-(const SampledField& o) const {
  require(grid_.same_as(o.grid_), "fields live on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] - o.values_[k];
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::operator*(double s) const {
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = s * values_[k];
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::map(const std::function<double(const Point&, double)>& fn) const {
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid_.point(k), values_[k]);
  return SampledField(grid_, std::move(v));
}

}  // namespace jetscope
