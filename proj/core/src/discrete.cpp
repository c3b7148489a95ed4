#include "jetscope/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "jetscope/error.hpp"

namespace jetscope {

double Region::depth(const Point& p, int dim) const noexcept {
  if (const auto* b = std::get_if<Ball>(&shape)) return b->radius - distance(p, b->center, dim);
  const Box& bx = std::get<Box>(shape);
  double d = std::min(p[0] - bx.lo[0], bx.hi[0] - p[0]);
  if (dim == 2) d = std::min({d, p[1] - bx.lo[1], bx.hi[1] - p[1]});
  return d;
}

Box Region::bounds(int dim) const noexcept {
  if (const auto* b = std::get_if<Ball>(&shape)) {
    Box out{{b->center[0] - b->radius, 0.0}, {b->center[0] + b->radius, 0.0}};
    if (dim == 2) {
      out.lo[1] = b->center[1] - b->radius;
      out.hi[1] = b->center[1] + b->radius;
    }
    return out;
  }
  return std::get<Box>(shape);
}

MaskedRegion::MaskedRegion(const Grid& grid, const Region& region, int order)
    : grid_(grid), region_(region), order_(order) {
  require(order >= 0, "mask order must be nonnegative");
  const int n = grid.dim();
  const double h = n == 1 ? grid.spacing(0) : std::min(grid.spacing(0), grid.spacing(1));
  const double tol = 1e-9 * h;
  const Box bounds = region.bounds(n);
  if (order > 0) {
    for (int a = 0; a < n; ++a)
      if (bounds.lo[a] < grid.lo(a) - tol || bounds.hi[a] > grid.hi(a) + tol)
        fail(ErrorCode::SupportViolation, "region leaves the grid box");
  }
  std::array<int, 2> lo{0, 0}, hi{0, 0};
  for (int a = 0; a < n; ++a) {
    const auto r = grid.node_range(a, bounds.lo[a], bounds.hi[a]);
    lo[a] = r[0];
    hi[a] = r[1];
  }
  std::vector<double> w;
  const double cell = grid.cell_volume();
  const double inset = order > 0 ? 0.5 * (order - 1) * h : 0.0;
  for (int j = lo[1]; j <= hi[1]; ++j) {
    for (int i = lo[0]; i <= hi[0]; ++i) {
      const double d = region.depth(grid.point(i, j), n);
      double weight = cell;
      if (order == 0) {
        if (d < -tol) continue;
        const Point x = grid.point(i, j);
        const bool on_boundary = std::abs(d) <= tol;
        if (region.is_ball()) {
          double edge = 1.0;
          if (i == 0 || i == grid.nodes(0) - 1) edge *= 0.5;
          if (n == 2 && (j == 0 || j == grid.nodes(1) - 1)) edge *= 0.5;
          // A sphere node on the grid edge is still a single trapezoid end.
          if (on_boundary) edge = std::min(edge, 0.5);
          weight *= edge;
        } else {
          // Per axis: a node is an end if it sits on the grid edge or on a box face.
          const Box& bx = region.box();
          const int end_i = grid.nodes(0) - 1;
          const bool ex = i == 0 || i == end_i || std::abs(x[0] - bx.lo[0]) <= tol || std::abs(x[0] - bx.hi[0]) <= tol;
          if (ex) weight *= 0.5;
          if (n == 2) {
            const bool ey = j == 0 || j == grid.nodes(1) - 1 || std::abs(x[1] - bx.lo[1]) <= tol ||
                            std::abs(x[1] - bx.hi[1]) <= tol;
            if (ey) weight *= 0.5;
          }
        }
      } else if (d <= inset + tol) {
        continue;
      }
      nodes_.push_back(grid.index(i, j));
      w.push_back(weight);
    }
  }
  if (nodes_.empty()) fail(ErrorCode::EmptyRegion, "region contains no admissible grid nodes");
  weights_ = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));

  std::array<int, 2> nlo{grid.coords(nodes_.front())}, nhi = nlo;
  for (std::size_t k : nodes_) {
    const auto c = grid.coords(k);
    for (int a = 0; a < 2; ++a) {
      nlo[a] = std::min(nlo[a], c[a]);
      nhi[a] = std::max(nhi[a], c[a]);
    }
  }
  for (int a = 0; a < 2; ++a) {
    const int halo = a < n ? order : 0;
    lat_lo_[a] = nlo[a] - halo;
    lat_n_[a] = nhi[a] - nlo[a] + 1 + 2 * halo;
  }
  lat_idx_.reserve(nodes_.size());
  for (std::size_t k : nodes_) {
    const auto c = grid.coords(k);
    lat_idx_.push_back(static_cast<std::size_t>(c[0] - lat_lo_[0]) +
                       static_cast<std::size_t>(lat_n_[0]) * static_cast<std::size_t>(c[1] - lat_lo_[1]));
  }
}

std::size_t MaskedRegion::lattice_size() const noexcept {
  return static_cast<std::size_t>(lat_n_[0]) * static_cast<std::size_t>(lat_n_[1]);
}

SampledField MaskedRegion::scatter(const Eigen::VectorXd& values) const {
  require(static_cast<std::size_t>(values.size()) == nodes_.size(), "vector length does not match mask");
  std::vector<double> v(grid_.size(), 0.0);
  for (std::size_t k = 0; k < nodes_.size(); ++k) v[nodes_[k]] = values[static_cast<Eigen::Index>(k)];
  return SampledField(grid_, std::move(v));
}

Eigen::VectorXd MaskedRegion::gather(const SampledField& field) const {
  require(field.grid().same_as(grid_), "field grid does not match mask grid");
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes_.size()));
  for (std::size_t k = 0; k < nodes_.size(); ++k) v[static_cast<Eigen::Index>(k)] = field[nodes_[k]];
  return v;
}

namespace {

/// Index bounds of the mask nodes.
std::pair<std::array<int, 2>, std::array<int, 2>> node_bounds(const MaskedRegion& mask) {
  const auto lo = mask.lattice_lo();
  const auto n = mask.lattice_count();
  const int halo = mask.order();
  const int dim = mask.grid().dim();
  std::array<int, 2> first{lo[0] + halo, dim == 2 ? lo[1] + halo : 0};
  std::array<int, 2> last{lo[0] + n[0] - 1 - halo, dim == 2 ? lo[1] + n[1] - 1 - halo : 0};
  return {first, last};
}

/// D_h^β f at the mask nodes, differentiating on a window around the mask.
Eigen::VectorXd derivative_at_mask(const SampledField& f, const MultiIndex& beta, const MaskedRegion& mask) {
  const Grid& g = f.grid();
  const int dim = g.dim();
  const int margin = 3 * beta.order() + 2;
  auto [first, last] = node_bounds(mask);
  std::array<int, 2> wlo{0, 0}, whi{0, 0};
  for (int a = 0; a < dim; ++a) {
    wlo[a] = std::max(0, first[a] - margin);
    whi[a] = std::min(g.nodes(a) - 1, last[a] + margin);
    // Windows need room for the five-point stencils.
    if (whi[a] - wlo[a] < 7) {
      wlo[a] = std::max(0, std::min(wlo[a], g.nodes(a) - 8));
      whi[a] = std::min(g.nodes(a) - 1, wlo[a] + 7);
    }
  }
  const SampledField win = f.window(wlo, whi).derivative(beta);
  Eigen::VectorXd out(static_cast<Eigen::Index>(mask.size()));
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto c = g.coords(mask.nodes()[k]);
    out[static_cast<Eigen::Index>(k)] = win[win.grid().index(c[0] - wlo[0], dim == 2 ? c[1] - wlo[1] : 0)];
  }
  return out;
}

/// Adds c·(−1)^{|β|}(D_h^β θ)(x0) as a functional on the mask nodes.
void add_atom(const Atom& atom, const MaskedRegion& mask, Eigen::VectorXd& b) {
  const Grid& g = mask.grid();
  const int dim = g.dim();
  std::array<double, 2> t{0.0, 0.0};
  std::array<int, 2> base{0, 0};
  for (int a = 0; a < dim; ++a) {
    const double u = (atom.location[a] - g.lo(a)) / g.spacing(a);
    base[a] = static_cast<int>(std::floor(u));
    t[a] = u - base[a];
  }
  // Position lookup for mask nodes near the atom.
  auto mask_slot = [&](int i, int j) -> long {
    if (i < 0 || i >= g.nodes(0) || j < 0 || j >= g.nodes(1)) return -1;
    const std::size_t idx = g.index(i, j);
    const auto it = std::lower_bound(mask.nodes().begin(), mask.nodes().end(), idx);
    if (it == mask.nodes().end() || *it != idx) return -1;
    return it - mask.nodes().begin();
  };
  auto hat = [&](const std::array<int, 2>& c) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int off = c[a] - base[a];
      if (off == 0)
        w *= 1.0 - t[a];
      else if (off == 1)
        w *= t[a];
      else
        return 0.0;
    }
    return w;
  };
  const int ord = atom.beta.order();
  if (ord == 0) {
    for (int dj = 0; dj <= (dim == 2 ? 1 : 0); ++dj)
      for (int di = 0; di <= 1; ++di) {
        const std::array<int, 2> c{base[0] + di, base[1] + dj};
        const long s = mask_slot(c[0], dim == 2 ? c[1] : 0);
        if (s >= 0) b[s] += atom.weight * hat(c);
      }
    return;
  }
  // Probe the finite-difference derivative with unit vectors on a local lattice.
  const int reach = 2 * ord + 4;
  std::array<int, 2> lo{base[0] - reach, dim == 2 ? base[1] - reach : 0};
  std::array<int, 2> cnt{2 * reach + 2, dim == 2 ? 2 * reach + 2 : 1};
  Point plo{g.lo(0) + lo[0] * g.spacing(0), dim == 2 ? g.lo(1) + lo[1] * g.spacing(1) : 0.0};
  Point phi{plo[0] + (cnt[0] - 1) * g.spacing(0), dim == 2 ? plo[1] + (cnt[1] - 1) * g.spacing(1) : 0.0};
  const Grid local(dim, plo, phi, cnt);
  const double sign = ord % 2 ? -1.0 : 1.0;
  for (int jj = 0; jj < cnt[1]; ++jj)
    for (int ii = 0; ii < cnt[0]; ++ii) {
      const long s = mask_slot(lo[0] + ii, dim == 2 ? lo[1] + jj : 0);
      if (s < 0) continue;
      std::vector<double> e(local.size(), 0.0);
      e[local.index(ii, jj)] = 1.0;
      const SampledField d = SampledField(local, std::move(e)).derivative(atom.beta);
      double v = 0.0;
      for (int dj = 0; dj <= (dim == 2 ? 1 : 0); ++dj)
        for (int di = 0; di <= 1; ++di) {
          const std::array<int, 2> c{base[0] + di, base[1] + dj};
          v += hat(c) * d[local.index(c[0] - lo[0], dim == 2 ? c[1] - lo[1] : 0)];
        }
      b[s] += sign * atom.weight * v;
    }
}

}  // namespace

Eigen::VectorXd functional_vector(const DistributionRep& t, const MaskedRegion& mask) {
  const Grid& g = mask.grid();
  require(t.dim() == g.dim(), "distribution dimension does not match grid");
  if (t.grid()) require(t.grid()->same_as(g), "distribution grid does not match mask grid");
  const Eigen::VectorXd& w = mask.weights();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mask.size()));
  for (const auto& term : t.fields()) {
    if (term.beta.order() == 0)
      b += term.coefficient * w.cwiseProduct(mask.gather(term.field));
    else
      b += term.coefficient * w.cwiseProduct(derivative_at_mask(term.field, term.beta, mask));
  }
  for (const auto& atom : t.atoms()) add_atom(atom, mask, b);
  for (const auto& poly : t.polynomials()) {
    if (poly.jet.degree() < 0) continue;
    const Polynomial local = poly.jet.local_polynomial();
    const Point a = poly.jet.basepoint();
    for (std::size_t k = 0; k < mask.size(); ++k) {
      const Point x = g.point(mask.nodes()[k]);
      const auto e = static_cast<Eigen::Index>(k);
      b[e] += poly.coefficient * w[e] * local({x[0] - a[0], x[1] - a[1]});
    }
  }
  return b;
}

Eigen::SparseMatrix<double> polylaplacian_matrix(const MaskedRegion& mask, int i, bool unit_spacing) {
  require(i >= 1, "poly-Laplacian power must be positive");
  require(mask.order() >= (i + 1) / 2, "mask halo too thin for this power");
  const Grid& g = mask.grid();
  const int dim = g.dim();
  const auto n = mask.lattice_count();
  const auto size = static_cast<Eigen::Index>(mask.lattice_size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(size) * (1 + 2 * dim));
  for (int y = 0; y < n[1]; ++y)
    for (int x = 0; x < n[0]; ++x) {
      const Eigen::Index row = x + static_cast<Eigen::Index>(n[0]) * y;
      double diag = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double ratio = unit_spacing ? g.spacing(0) / g.spacing(a) : 1.0 / g.spacing(a);
        const double c = ratio * ratio;
        diag -= 2.0 * c;
        const int pos = a == 0 ? x : y;
        const Eigen::Index stride = a == 0 ? 1 : n[0];
        if (pos > 0) trip.emplace_back(row, row - stride, c);
        if (pos + 1 < n[a]) trip.emplace_back(row, row + stride, c);
      }
      trip.emplace_back(row, row, diag);
    }
  Eigen::SparseMatrix<double> l(size, size);
  l.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> li = l;
  for (int k = 1; k < i; ++k) li = (li * l).pruned();

  const auto m = static_cast<Eigen::Index>(mask.size());
  Eigen::SparseMatrix<double> sel(m, size);
  std::vector<Eigen::Triplet<double>> st;
  st.reserve(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k)
    st.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(mask.lattice_index()[k]), 1.0);
  sel.setFromTriplets(st.begin(), st.end());
  Eigen::SparseMatrix<double> a = sel * li * sel.transpose();
  a.makeCompressed();
  return a;
}

// ---------------------------------------------------------------------------

DifferenceEnergy::DifferenceEnergy(const MaskedRegion& mask, int i, double q) : mask_(mask), i_(i), q_(q) {
  require(i >= 0, "derivative order must be nonnegative");
  require(q >= 1.0 && std::isfinite(q), "energy exponent must be finite and at least 1");
  require(i == 0 || mask.order() >= i, "mask halo too thin for the difference order");
  alphas_ = enumerate_multiindices(mask.grid().dim(), i);
  for (const auto& a : alphas_) multinomials_.push_back(a.multinomial());
}

void DifferenceEnergy::forward(std::vector<double>& lat, int axis) const {
  const auto n = mask_.lattice_count();
  const double inv = 1.0 / mask_.grid().spacing(axis);
  const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(n[0]);
  for (int y = 0; y < n[1]; ++y)
    for (int x = 0; x < n[0]; ++x) {
      const std::size_t k = static_cast<std::size_t>(x) + static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(y);
      const int pos = axis == 0 ? x : y;
      const double next = pos + 1 < n[axis] ? lat[k + stride] : 0.0;
      lat[k] = (next - lat[k]) * inv;
    }
}

void DifferenceEnergy::adjoint(std::vector<double>& lat, int axis) const {
  const auto n = mask_.lattice_count();
  const double inv = 1.0 / mask_.grid().spacing(axis);
  const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(n[0]);
  for (int y = n[1] - 1; y >= 0; --y)
    for (int x = n[0] - 1; x >= 0; --x) {
      const std::size_t k = static_cast<std::size_t>(x) + static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(y);
      const int pos = axis == 0 ? x : y;
      const double prev = pos > 0 ? lat[k - stride] : 0.0;
      lat[k] = (prev - lat[k]) * inv;
    }
}

double DifferenceEnergy::power(const Eigen::VectorXd& theta) const { return compute(theta, nullptr); }

double DifferenceEnergy::norm(const Eigen::VectorXd& theta) const { return std::pow(power(theta), 1.0 / q_); }

Eigen::VectorXd DifferenceEnergy::gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g;
  compute(theta, &g);
  return g;
}

double DifferenceEnergy::power_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  return compute(theta, &grad);
}

double DifferenceEnergy::compute(const Eigen::VectorXd& theta, Eigen::VectorXd* grad_out) const {
  const bool want_grad = grad_out != nullptr;
  Eigen::VectorXd scratch;
  Eigen::VectorXd& grad = want_grad ? *grad_out : scratch;
  const auto m = static_cast<std::size_t>(theta.size());
  require(m == mask_.size(), "vector length does not match mask");
  if (i_ == 0) {
    const Eigen::VectorXd& w = mask_.weights();
    double acc = 0.0;
    if (want_grad) grad.resize(theta.size());
    for (std::size_t k = 0; k < m; ++k) {
      const auto e = static_cast<Eigen::Index>(k);
      const double a = std::abs(theta[e]);
      acc += w[e] * (q_ == 2.0 ? a * a : std::pow(a, q_));
      if (want_grad) grad[e] = a == 0.0 ? 0.0 : q_ * w[e] * std::pow(a, q_ - 1.0) * (theta[e] > 0 ? 1.0 : -1.0);
    }
    return acc;
  }
  const std::size_t size = mask_.lattice_size();
  const int dim = mask_.grid().dim();
  std::vector<double> base(size, 0.0);
  for (std::size_t k = 0; k < m; ++k) base[mask_.lattice_index()[k]] = theta[static_cast<Eigen::Index>(k)];
  std::vector<std::vector<double>> diffs(alphas_.size());
  std::vector<double> s(size, 0.0);
  for (std::size_t t = 0; t < alphas_.size(); ++t) {
    diffs[t] = base;
    for (int a = 0; a < dim; ++a)
      for (int r = 0; r < alphas_[t][a]; ++r) forward(diffs[t], a);
    for (std::size_t k = 0; k < size; ++k) s[k] += multinomials_[t] * diffs[t][k] * diffs[t][k];
  }
  const double cell = mask_.grid().cell_volume();
  double acc = 0.0;
  std::vector<double> factor(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    if (s[k] <= 0.0) continue;
    if (q_ == 2.0) {
      acc += s[k];
      factor[k] = 1.0;
    } else {
      const double sp = std::pow(s[k], 0.5 * q_ - 1.0);
      acc += sp * s[k];
      factor[k] = sp;
    }
  }
  acc *= cell;
  if (!want_grad) return acc;
  std::vector<double> g(size, 0.0);
  for (std::size_t t = 0; t < alphas_.size(); ++t) {
    std::vector<double>& d = diffs[t];
    for (std::size_t k = 0; k < size; ++k) d[k] *= factor[k];
    for (int a = 0; a < dim; ++a)
      for (int r = 0; r < alphas_[t][a]; ++r) adjoint(d, a);
    for (std::size_t k = 0; k < size; ++k) g[k] += multinomials_[t] * d[k];
  }
  grad.resize(theta.size());
  for (std::size_t k = 0; k < m; ++k)
    grad[static_cast<Eigen::Index>(k)] = q_ * cell * g[mask_.lattice_index()[k]];
  return acc;
}

}  // namespace jetscope
