#include "jetscope/jets.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "jetscope/error.hpp"
#include "jetscope/pde.hpp"

namespace jetscope::jets {

namespace {

/// Columns ((x − a)/r)^β for |β| ≤ k, in multiindices_up_to order.
Eigen::MatrixXd scaled_basis(const std::vector<Point>& xs, const Point& a, double r, int dim, int k) {
  const auto betas = multiindices_up_to(dim, k);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(betas.size()));
  for (std::size_t row = 0; row < xs.size(); ++row) {
    const double z0 = (xs[row][0] - a[0]) / r;
    const double z1 = dim == 2 ? (xs[row][1] - a[1]) / r : 0.0;
    for (std::size_t c = 0; c < betas.size(); ++c) {
      double v = std::pow(z0, betas[c][0]);
      if (dim == 2) v *= std::pow(z1, betas[c][1]);
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

/// d_β multiplies ((x − a)/r)^β, so the jet coefficient is d_β β!/r^{|β|}.
Jet jet_from_scaled(const Eigen::VectorXd& d, const Point& a, double r, int dim, int k) {
  Jet jet(dim, a, k);
  const auto betas = multiindices_up_to(dim, k);
  for (std::size_t c = 0; c < betas.size(); ++c)
    jet.set_coeff(betas[c], d[static_cast<Eigen::Index>(c)] * betas[c].factorial() / std::pow(r, betas[c].order()));
  return jet;
}

/// Weighted least squares min Σ w (y − Bc)^2, normal equations first and a
/// pivoted QR of the weighted system when those are ill-conditioned.
Eigen::VectorXd weighted_lsq(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd g = basis.transpose() * w.asDiagonal() * basis;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  if (lo > 0.0 && hi / lo <= 1e12) return g.ldlt().solve(basis.transpose() * (w.asDiagonal() * y));
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * basis;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-13);
  if (qr.rank() < basis.cols()) fail(ErrorCode::IllConditioned, "polynomial basis is degenerate on the ball");
  const Eigen::VectorXd c = qr.solve(Eigen::VectorXd(sw.asDiagonal() * y));
  const Eigen::VectorXd s = qr.matrixR().diagonal().cwiseAbs();
  if (s.minCoeff() <= 0.0 || s.maxCoeff() / s.minCoeff() > 1e12)
    fail(ErrorCode::IllConditioned, "polynomial basis is ill-conditioned on the ball");
  return c;
}

double weighted_lp(const Eigen::VectorXd& e, const Eigen::VectorXd& w, double p) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < e.size(); ++j) acc += w[j] * std::pow(std::abs(e[j]), p);
  return std::pow(acc, 1.0 / p);
}

/// min_c (Σ w |y − Bc|^p)^{1/p}: least squares for p = 2, IRLS otherwise.
std::pair<Eigen::VectorXd, int> lp_fit(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                       double p) {
  Eigen::VectorXd c = weighted_lsq(basis, y, w);
  if (p == 2.0) return {c, 1};
  const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  double prev = weighted_lp(y - basis * c, w, p);
  int it = 1;
  for (; it < 500; ++it) {
    const Eigen::VectorXd e = y - basis * c;
    Eigen::VectorXd wi(e.size());
    for (Eigen::Index j = 0; j < e.size(); ++j) wi[j] = w[j] * std::pow(std::max(std::abs(e[j]), 1e-10 * scale), p - 2.0);
    const Eigen::VectorXd next = weighted_lsq(basis, y, wi);
    const double obj = weighted_lp(y - basis * next, w, p);
    if (obj <= prev) c = next;
    if (std::abs(prev - obj) <= 1e-8 * std::max(prev, 1e-300) || obj > prev) {
      prev = std::min(prev, obj);
      break;
    }
    prev = obj;
  }
  return {c, it};
}

}  // namespace

JetFit fit_jet_lp(const SampledField& f, const Point& a, double r, int k, double p) {
  require(k >= -1, "degree must be at least -1");
  require(r > 0.0, "scale must be positive");
  if (!(p >= 1.0 && std::isfinite(p))) fail(ErrorCode::UnsupportedExponent, "jet fitting needs 1 <= p < inf");
  const Grid& g = f.grid();
  const int dim = g.dim();
  const auto quad = region_quadrature(g, Ball(a, r, true));
  if (quad.empty()) fail(ErrorCode::EmptyRegion, "ball contains no grid nodes");
  std::vector<Point> xs;
  Eigen::VectorXd y(static_cast<Eigen::Index>(quad.size())), w(y.size());
  for (std::size_t j = 0; j < quad.size(); ++j) {
    xs.push_back(g.point(quad[j].index));
    y[static_cast<Eigen::Index>(j)] = f[quad[j].index];
    w[static_cast<Eigen::Index>(j)] = quad[j].weight;
  }
  JetFit out;
  if (k < 0) {
    out.jet = Jet::zero(dim, a);
    out.residual = weighted_lp(y, w, p);
    return out;
  }
  const Eigen::MatrixXd basis = scaled_basis(xs, a, r, dim, k);
  auto [c, it] = lp_fit(basis, y, w, p);
  out.jet = jet_from_scaled(c, a, r, dim, k);
  out.residual = weighted_lp(y - basis * c, w, p);
  out.iterations = it;
  return out;
}

namespace {

struct DualSetup {
  std::shared_ptr<const pde::RieszSolver> solver;
  MaskedRegion mask;
  Eigen::VectorXd b;
  Eigen::MatrixXd basis;  // functional vectors of the scaled monomials
};

DualSetup prepare(const DistributionRep& t, const Point& a, double r, int k_max, const norms::NormSpec& spec,
                  bool need_solver) {
  const Grid* g = t.grid();
  if (!g) fail(ErrorCode::MissingDerivativeData, "distribution carries no grid");
  const Ball ball(a, r);
  std::shared_ptr<const pde::RieszSolver> solver;
  if (need_solver) solver = pde::riesz_solver(*g, Region(ball), spec.i);
  MaskedRegion mask = solver ? solver->mask() : MaskedRegion(*g, Region(ball), spec.i);
  if (mask.size() == 0) fail(ErrorCode::EmptyRegion, "ball contains no admissible grid nodes");
  DualSetup s{solver, mask, functional_vector(t, mask), {}};
  const auto betas = multiindices_up_to(g->dim(), std::max(k_max, 0));
  const int cols = k_max < 0 ? 0 : static_cast<int>(betas.size());
  s.basis.resize(static_cast<Eigen::Index>(mask.size()), cols);
  for (int c = 0; c < cols; ++c) {
    Jet m(g->dim(), a, betas[static_cast<std::size_t>(c)].order());
    m.set_coeff(betas[static_cast<std::size_t>(c)], betas[static_cast<std::size_t>(c)].factorial() / std::pow(r, betas[static_cast<std::size_t>(c)].order()));
    DistributionRep mono(g->dim());
    mono.add_polynomial(m);
    s.basis.col(c) = functional_vector(mono, s.mask);
  }
  return s;
}

std::size_t basis_count(int dim, int k) { return k < 0 ? 0 : multiindices_up_to(dim, k).size(); }

/// Hilbert-space projection for p = 2 sharing K^{-1}b and K^{-1}B across degrees.
std::vector<JetFit> riesz_fits(const DualSetup& s, const Point& a, double r, int dim, int k_max) {
  const Eigen::VectorXd ut = s.solver->solve(s.b);
  const Eigen::MatrixXd ub = s.basis.cols() ? s.solver->solve(s.basis) : Eigen::MatrixXd();
  std::vector<JetFit> fits;
  for (int k = -1; k <= k_max; ++k) {
    const auto m = static_cast<Eigen::Index>(basis_count(dim, k));
    JetFit fit;
    Eigen::VectorXd e = s.b, ue = ut;
    if (m > 0) {
      const Eigen::MatrixXd bm = s.basis.leftCols(m);
      const Eigen::MatrixXd um = ub.leftCols(m);
      const Eigen::MatrixXd gram = bm.transpose() * um;
      const Eigen::VectorXd rhs = bm.transpose() * ut;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
      const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
      if (qr.rank() < m || diag.maxCoeff() / diag.minCoeff() > 1e14)
        fail(ErrorCode::IllConditioned, "polynomial Gram matrix is ill-conditioned on the ball");
      const Eigen::VectorXd c = qr.solve(rhs);
      e -= bm * c;
      ue -= um * c;
      fit.jet = jet_from_scaled(c, a, r, dim, k);
    } else {
      fit.jet = Jet::zero(dim, a);
    }
    fit.residual = std::sqrt(std::max(0.0, e.dot(ue)));
    fit.iterations = 1;
    fits.push_back(std::move(fit));
  }
  return fits;
}

/// Danskin descent on c ↦ |T − Σ c_β m_β|_{−i,p} from a warm start.
JetFit descend(const DualSetup& s, const Eigen::VectorXd& c0, const Point& a, double r, int dim, int k,
               const norms::NormSpec& spec) {
  const auto m = static_cast<Eigen::Index>(basis_count(dim, k));
  const Eigen::MatrixXd bm = s.basis.leftCols(m);
  const double q = spec.q();
  auto evaluate = [&](const Eigen::VectorXd& c) { return norms::maximize_pairing(s.mask, s.b - bm * c, spec.i, q); };
  Eigen::VectorXd c = c0;
  norms::DualResult cur = evaluate(c);
  double f = cur.value;
  double step = 1.0;
  int it = 0;
  for (; it < 60 && f > 0.0 && m > 0; ++it) {
    // Danskin: the gradient of c ↦ max_θ (b − Bc)ᵀθ is −Bᵀθ* at the maximizer.
    const Eigen::VectorXd grad = -bm.transpose() * cur.theta;
    const double gnorm = grad.norm();
    if (gnorm == 0.0) break;
    bool improved = false;
    while (step > 1e-12) {
      const Eigen::VectorXd trial = c - (step * f / gnorm) * grad;
      norms::DualResult next = evaluate(trial);
      if (next.value < f) {
        const double gain = (f - next.value) / f;
        c = trial;
        f = next.value;
        cur = std::move(next);
        improved = true;
        step *= 2.0;
        if (gain < 1e-8) it = 60;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  JetFit fit;
  fit.jet = jet_from_scaled(c, a, r, dim, k);
  fit.residual = f;
  fit.iterations = it;
  return fit;
}

}  // namespace

std::vector<JetFit> fit_jets_dual(const DistributionRep& t, const Point& a, double r, int k_max,
                                  const norms::NormSpec& spec) {
  require(k_max >= -1, "degree must be at least -1");
  require(r > 0.0, "scale must be positive");
  const int dim = t.dim();
  const bool p2 = spec.p == 2.0;
  if (!p2 && !(spec.p > 1.0 && std::isfinite(spec.p)) && spec.i > 0)
    fail(ErrorCode::UnsupportedExponent, "dual jet fitting needs 1 < p < inf for positive orders");
  if (!p2 && !(spec.p >= 1.0 && std::isfinite(spec.p)))
    fail(ErrorCode::UnsupportedExponent, "dual jet fitting needs 1 <= p < inf");
  const DualSetup s = prepare(t, a, r, k_max, spec, p2 || spec.i > 0);
  if (p2) return riesz_fits(s, a, r, dim, k_max);

  std::vector<JetFit> fits;
  if (spec.i == 0) {
    // Order zero: the modulus is the weighted L^p norm of the density b/w.
    const Eigen::VectorXd& w = s.mask.weights();
    const Eigen::VectorXd y = s.b.cwiseQuotient(w);
    for (int k = -1; k <= k_max; ++k) {
      JetFit fit;
      const auto m = static_cast<Eigen::Index>(basis_count(dim, k));
      if (m == 0) {
        fit.jet = Jet::zero(dim, a);
        fit.residual = weighted_lp(y, w, spec.p);
      } else {
        const Eigen::MatrixXd bm = s.basis.leftCols(m).array().colwise() / w.array();
        auto [c, it] = lp_fit(bm, y, w, spec.p);
        fit.jet = jet_from_scaled(c, a, r, dim, k);
        fit.residual = weighted_lp(y - bm * c, w, spec.p);
        fit.iterations = it;
      }
      fits.push_back(std::move(fit));
    }
    return fits;
  }
  // Positive order, p ≠ 2: warm start from the Hilbert projection.
  const std::vector<JetFit> warm = riesz_fits(s, a, r, dim, k_max);
  const auto betas = multiindices_up_to(dim, std::max(k_max, 0));
  for (int k = -1; k <= k_max; ++k) {
    const auto m = static_cast<Eigen::Index>(basis_count(dim, k));
    Eigen::VectorXd c0(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const MultiIndex& beta = betas[static_cast<std::size_t>(j)];
      c0[j] = warm[static_cast<std::size_t>(k + 1)].jet.coeff(beta) * std::pow(r, beta.order()) / beta.factorial();
    }
    fits.push_back(descend(s, c0, a, r, dim, k, spec));
  }
  return fits;
}

JetFit fit_jet_dual(const DistributionRep& t, const Point& a, double r, int k, const norms::NormSpec& spec) {
  return fit_jets_dual(t, a, r, k, spec).back();
}

Jet taylor_jet(const SampledField& f, const Point& a, int k) {
  require(k >= 0, "degree must be nonnegative");
  const Grid& g = f.grid();
  for (int ax = 0; ax < g.dim(); ++ax) {
    const double margin = 2.0 * g.spacing(ax);
    if (a[ax] < g.lo(ax) + margin || a[ax] > g.hi(ax) - margin)
      fail(ErrorCode::BoundaryPoint, "Taylor jet requested too close to the grid boundary");
  }
  Jet jet(g.dim(), a, k);
  for (const auto& beta : multiindices_up_to(g.dim(), k)) {
    const SampledField d = beta.order() == 0 ? f : f.derivative(beta);
    jet.set_coeff(beta, d.interpolate(a));
  }
  return jet;
}

VerifierReport reshetnyak_check(const SampledField& f, const Point& a, int k, const norms::NormSpec& spec,
                                const std::vector<double>& ladder, double tau) {
  require(ladder.size() >= 4, "need at least four scales");
  VerifierReport rep;
  rep.inequality = "r^(-n/q-k-i) |f - P_taylor|_{-i,q;a,r} -> 0";
  rep.parameters = {{"k", k}, {"i", spec.i}, {"p", spec.p}};
  const Jet p = taylor_jet(f, a, k);
  const DistributionRep diff = DistributionRep::from_field(f).minus(p);
  const norms::NormSpec dual_spec{spec.i, spec.q()};
  const int n = f.grid().dim();
  const double expo = n / spec.q() + k + spec.i;
  std::vector<double> values;
  Json table = Json::array();
  for (double r : ladder) {
    const auto method = dual_spec.p == 2.0 ? norms::DualMethod::Riesz : norms::DualMethod::Optimization;
    const double raw = norms::dual_norm(diff, Ball(a, r), dual_spec, method);
    const double v = std::pow(r, -expo) * raw;
    values.push_back(v);
    table.push_back({{"r", r}, {"normalized", v}});
  }
  const std::size_t m = values.size();
  const std::size_t first = m - 4;
  // Least-squares slope of log2(value) against the halving count.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool at_floor = false;
  for (std::size_t j = first; j < m; ++j) {
    const double x = static_cast<double>(j - first);
    if (values[j] <= 1e-12 * std::max(values.front(), 1e-300)) at_floor = true;
    const double y = std::log2(std::max(values[j], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  rep.add("decay slope per halving", slope, -tau, at_floor || slope <= -tau, {{"at_floor", at_floor}});
  rep.summary["taylor_jet"] = p.str();
  rep.summary["profile"] = table;
  return rep;
}

}  // namespace jetscope::jets
